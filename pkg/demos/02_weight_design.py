"""Consensus weight matrices from graph Laplacians.

The averaging matrix is W = I - c L with c = 2 / (sigma_1(L)^2 +
sigma_{N-1}(L)^2). For a connected graph this W is symmetric, doubly
stochastic, and its second singular value sigma_2 is strictly below one;
sigma_2 is the whole story for how fast information spreads.
"""

import numpy as np

from bitcusum import (
    build_laplacian_weights,
    lemma1_bound,
    mesh12_topology,
    ring_topology,
)

for name, topo in (("4-cycle", ring_topology(4, secure=(0, 2))),
                   ("12-ring", ring_topology(12, secure=(0, 1, 2, 3))),
                   ("mesh12", mesh12_topology())):
    w = build_laplacian_weights(topo)
    r = w.report
    print(f"{name:8s} N={topo.n_sensors:3d} edges={len(topo.edges):3d} "
          f"sigma2={w.sigma2:.4f}  conditions_ok={r.ok} "
          f"row/col sum error {max(r.row_sum_error, r.col_sum_error):.1e}")

# The read-out error bound N^{3/2} s / (1 - s), s = sigma2^Q, decays
# geometrically in the rounds-per-interval budget Q.
topo = mesh12_topology()
w = build_laplacian_weights(topo)
print(f"\nmesh12 read-out error bound vs rounds per interval "
      f"(sigma2 = {w.sigma2:.4f}):")
for q_rounds in (1, 2, 5, 10, 20, 40):
    bound = lemma1_bound(topo.n_sensors, w.sigma2, q_rounds)
    print(f"  Q = {q_rounds:3d}   bound = {bound:12.4f} bits")

# Chord placement matters: the plain 12-ring mixes far slower.
ring12 = build_laplacian_weights(ring_topology(12, secure=(0, 1, 2, 3)))
q_rounds = 10
print(f"\nAt Q = {q_rounds}: mesh12 bound "
      f"{lemma1_bound(12, w.sigma2, q_rounds):.2f} bits, plain ring "
      f"{lemma1_bound(12, ring12.sigma2, q_rounds):.2f} bits.")
print("Six chords buy three orders of magnitude.")
