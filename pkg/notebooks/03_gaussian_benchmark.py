"""Coherent plus squeezed light, checked against the exact Fock computation.

Run with ``python3 notebooks/03_gaussian_benchmark.py``.
"""

import numpy as np

from qmetro.errorprop import DecoherencePenalty, coherent_squeezed_precision, optimal_coherent_squeezed
from qmetro.fock_core import TwoModeGrid
from qmetro.gaussian import (coherent_amplitudes, coherent_squeezed_qfi, phase_averaged_qfi,
                             squeezed_amplitudes)

print(f"{'|a|^2':>6} {'r':>5} {'covariance':>12} {'Fock':>12}")
for a2, r in ((1.0, 0.3), (2.0, 0.6), (4.0, 1.0)):
    grid = TwoModeGrid.product(coherent_amplitudes(np.sqrt(a2), 90), squeezed_amplitudes(r, 0.0, 90))
    print(f"{a2:>6} {r:>5} {coherent_squeezed_qfi(np.sqrt(a2), r):>12.8f} {phase_averaged_qfi(grid):>12.8f}")

# Without noise the best photon split gives N^(-3/4) scaling.
for n in (1e2, 1e4, 1e6):
    r, d = optimal_coherent_squeezed(n)
    print(f"N = {n:.0e}: sinh^2 r = {np.sinh(r) ** 2:9.2f}, N^(3/4) dphi = {d * n ** 0.75:.4f}")

# With loss, strong squeezing approaches sqrt(f)/sqrt(N).
pen = DecoherencePenalty("loss", 0.8)
n = 1e8
for r in (1.0, 2.0, 3.0, 4.0):
    d = coherent_squeezed_precision(np.sqrt(n - np.sinh(r) ** 2), r, np.pi / 2, pen)
    print(f"r = {r}: dphi / (sqrt(f)/sqrt(N)) = {d / (np.sqrt(pen.f / n)):.4f}")
