"""Noiseless interferometry: shot noise, the Heisenberg limit and Bayesian costs.

Run with ``python3 notebooks/01_noiseless_limits.py``.
"""

import numpy as np

from qmetro.bayes import IDEAL, build_cost_matrix, cost_for_state, optimal_state_and_cost
from qmetro.fock_core import build_j_operators, make_named_state
from qmetro.qfi import qfi_pure

print("QFI of N photon inputs for the phase between the arms")
print(f"{'N':>4} {'balanced':>10} {'NOON':>10}")
for n in (1, 2, 4, 8, 16):
    jz = build_j_operators(n).jz
    vals = []
    for kind in ("balanced", "noon"):
        c = make_named_state(kind, n).coeffs
        vals.append(qfi_pure(c, -1j * jz @ c))
    print(f"{n:>4} {vals[0]:>10.4f} {vals[1]:>10.4f}")

# With a flat prior the NOON state is useless: its cost does not fall with N.
# The optimal input has sine-shaped amplitudes and reaches pi/N.
print("\nFlat-prior cost  2<1 - cos(phi_est - phi)>")
print(f"{'N':>6} {'NOON':>10} {'optimal':>10} {'N sqrt(cost)/pi':>16}")
for n in (2, 10, 100, 1000):
    a = build_cost_matrix(IDEAL, n)
    _, best = optimal_state_and_cost(a)
    noon = cost_for_state(a, make_named_state("noon", n))
    print(f"{n:>6} {noon:>10.4f} {best:>10.6f} {n * np.sqrt(best) / np.pi:>16.5f}")
