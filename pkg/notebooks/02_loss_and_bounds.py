"""Photon loss: exact optimal states against the asymptotic bound.

Run with ``python3 notebooks/02_loss_and_bounds.py``.  Takes a few seconds.
"""

import numpy as np

from qmetro.bayes import build_cost_matrix, lossy_lower_bound
from qmetro.bounds import asymptotic_loss_bound, loss_f_qs, loss_qs_problem, qs_optimize
from qmetro.channels import LossParams, lossy_qfi, optimal_lossy_state
from qmetro.cli import ligo_gap
from qmetro.fock_core import make_named_state

eta = 0.9
params = LossParams.equal(eta)
print(f"Equal losses, eta = {eta}")
print(f"{'N':>4} {'NOON':>9} {'optimal':>9} {'bound':>9}")
for n in (1, 2, 5, 10, 15, 20):
    noon = 1 / np.sqrt(lossy_qfi(make_named_state("noon", n), params))
    _, f = optimal_lossy_state(n, params)
    print(f"{n:>4} {noon:>9.4f} {1 / np.sqrt(f):>9.4f} {asymptotic_loss_bound(n, eta):>9.4f}")

# The bound comes from minimizing over Kraus representations of the
# single-photon channel.  The numerical search reproduces the closed form.
for ea, eb in ((0.9, 0.9), (0.8, 0.6)):
    res = qs_optimize(loss_qs_problem(LossParams(ea, eb)), starts=5)
    print(f"F_QS({ea}, {eb}): search {res.f_qs:.8f}, closed form {loss_f_qs(ea, eb):.8f}")

# The Bayesian lower bound approaches the same constant at large N.
n = 2000
lb = lossy_lower_bound(build_cost_matrix(params, n))
print(f"sqrt(N * Bayesian lower bound) at N={n}: {np.sqrt(n * lb):.4f}; "
      f"asymptote {np.sqrt((1 - eta) / eta):.4f}")

# Gravitational-wave detector numbers: 10 dB squeezing, 62% efficiency.
print(f"gap between squeezed light and the bound: {ligo_gap(0.62, 0.1):.1%}")
