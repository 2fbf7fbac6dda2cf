"""
How tight are the relaxations?
==============================

Compare the three LP lower bounds with exact optima on small random graphs.
The exact values come from a subset dynamic program.
"""

import numpy as np

from spreadlayout import (
    exact_cutwidth,
    exact_mla,
    exact_vs,
    lpcw_lower_bound,
    random_graph,
    solve_mla_lp,
    solve_vs_lp,
)

print(f"{'seed':>4} {'n':>3} {'m':>3} | {'L*':>7} {'MLA':>4} | {'P*/n':>6} {'VS':>3} | {'C**':>6} {'CW':>3}")
gaps = []
for seed in range(8):
    G = random_graph(9, "gnm", m=14, seed=seed)
    L = solve_mla_lp(G).objective
    P = solve_vs_lp(G).objective / G.n
    C = lpcw_lower_bound(G).C
    mla, vs, cw = exact_mla(G).value, exact_vs(G).value, exact_cutwidth(G).value
    gaps.append(cw / C)
    print(f"{seed:>4} {G.n:>3} {G.m:>3} | {L:7.3f} {mla:4g} | {P:6.3f} {vs:3d} | {C:6.3f} {cw:3g}")

# The flow-metric relaxation is much closer to cutwidth than L*/n.
print(f"mean CW / C** gap: {np.mean(gaps):.2f}")
