"""
Cutwidth orderings from a spreading metric
==========================================

A small tour of the pipeline on a 6x6 grid: solve the LP, look at the
radius scales it induces, cut the graph once, then run the full recursion.
"""

import numpy as np

from spreadlayout import compute_scales, cutwidth_cost, mla_cost, random_graph, solve_cutwidth, solve_mla_lp
from spreadlayout.decompose import vertex_scales
from spreadlayout.layout import partition_and_arrange

G = random_graph(36, "grid")
print(f"grid: n={G.n}, m={G.m}")

# The LP returns a shortest-path metric whose edge lengths sum to L*.
sol = solve_mla_lp(G)
print(f"L* = {sol.objective:.3f} after {sol.rounds} separation rounds")
print(f"cutwidth lower bound L*/n = {sol.objective / G.n:.3f}")

# Every vertex picks a radius scale and a size class from its ball growth.
params = compute_scales(G.n)
sc = vertex_scales(sol.d, params)
print(f"gamma={params.gamma:.3f} ell={params.ell} beta={params.beta:.3g}")
for i in params.scales:
    print(f"  scale {i}: {len(sc.groups[i])} vertices, radius {params.Delta[i]:.3f}")

# One level of the decomposition: an ordered list of pieces, none larger than n/2.
op = partition_and_arrange(G, sol, params, np.random.default_rng(0))
print("piece sizes:", [len(S) for S in op.pieces])
print(f"budget audit ok={op.audit.ok}, worst ratio {op.audit.worst:.2e}")

# The recursive driver orders each piece in turn.
res = solve_cutwidth(G)
print(f"cutwidth {cutwidth_cost(G, res.ordering):g}, linear arrangement {mla_cost(G, res.ordering):g}")
print(f"{len(res.levels)} recursion nodes, {res.retries} cut retries")
