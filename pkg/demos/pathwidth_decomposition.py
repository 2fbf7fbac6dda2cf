"""
Vertex separation and path decompositions
=========================================

The vertex variant cuts vertices instead of edges.  Its ordering turns into
a path decomposition whose width never exceeds the vertex separation.
"""

from spreadlayout import (
    Graph,
    approximation_factor,
    exact_vs,
    pathwidth_decomposition,
    pathwidth_order,
    validate_path_decomposition,
    vs_cost,
)

# A caterpillar: a spine of 6 vertices, each carrying two leaves.
spine = [(v, v + 1) for v in range(5)]
legs = [(v, 6 + 2 * v + k) for v in range(6) for k in range(2)]
G = Graph.from_edges(18, spine + legs)

pi = pathwidth_order(G)
print("ordering:", pi.sequence)
print("vertex separation:", vs_cost(G, pi), " exact:", exact_vs(G).value)
# Cut vertices leave each round as singletons in id order, so on small
# inputs the result can sit well above the optimum while staying far
# inside the proven factor.
print(f"guaranteed factor at n={G.n}: {approximation_factor(G.n):.3g}")

pd = pathwidth_decomposition(G)
print("width:", pd.width, " valid:", bool(validate_path_decomposition(G, pd)))
for t, bag in enumerate(pd.bags[:6]):
    print(f"  bag {t}: {sorted(bag)}")
print("  ...")

# Breaking the interval property is caught by the validator.
broken = type(pd)(pd.bags[:1] + pd.bags[2:] + pd.bags[1:2])
print(validate_path_decomposition(G, broken).message)
