"""Error-propagation precision of photon-number-difference detection.

The interferometer maps Jz to cos(phi) Jz - sin(phi) Jx in the Heisenberg
picture, so the output mean and variance of Jz follow from five input
moments.  Loss and dephasing rescale the signal by eta and add f(eta) <N>/4
to the rescaled variance.
"""

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import DomainError, NumericError


@dataclass(frozen=True)
class InputMoments:
    mean_jx: float
    mean_jz: float
    var_jx: float
    var_jz: float
    cov_xz: float
    mean_n: float

    def __post_init__(self):
        if self.var_jx < -1e-12 or self.var_jz < -1e-12:
            raise DomainError("variances must be nonnegative")
        if self.cov_xz ** 2 > self.var_jx * self.var_jz + 1e-12:
            raise DomainError("covariance exceeds the Cauchy-Schwarz limit")


@dataclass(frozen=True)
class DecoherencePenalty:
    model: str = "none"
    eta: float = 1.0

    def __post_init__(self):
        if self.model not in ("none", "loss", "dephasing"):
            raise DomainError(f"unknown decoherence model {self.model!r}")
        if not 0.0 < self.eta <= 1.0:
            raise DomainError("eta must lie in (0, 1]")
        if self.model == "none" and self.eta != 1.0:
            raise DomainError("the noiseless model has eta = 1")

    @property
    def f(self):
        if self.model == "loss":
            return (1 - self.eta) / self.eta
        if self.model == "dephasing":
            return (1 - self.eta ** 2) / self.eta ** 2
        return 0.0


NONE = DecoherencePenalty()


def input_moments(kind, **params):
    """Moments of "coherent_vacuum"(alpha), "fock"(n), "coherent_squeezed"(alpha, r)
    or "half_noon_like"(n)."""
    if kind == "coherent_vacuum":
        a2 = abs(params["alpha"]) ** 2
        return InputMoments(0.0, a2 / 2, a2 / 4, a2 / 4, 0.0, a2)
    if kind == "fock":
        n = params["n"]
        return InputMoments(0.0, n / 2, n / 4, 0.0, 0.0, float(n))
    if kind == "coherent_squeezed":
        alpha = complex(params["alpha"])
        r = params["r"]
        a2 = abs(alpha) ** 2
        sh2 = np.sinh(r) ** 2
        var_jx = (a2 * np.cosh(2 * r) - (alpha ** 2).real * np.sinh(2 * r) + sh2) / 4
        var_jz = (a2 + 2 * sh2 * np.cosh(r) ** 2) / 4
        return InputMoments(0.0, (a2 - sh2) / 2, var_jx, var_jz, 0.0, a2 + sh2)
    if kind == "half_noon_like":
        n = params["n"]
        if n < 2 or n % 2:
            raise DomainError("the state needs an even N >= 2")
        jj = n / 2 * (n / 2 + 1)
        return InputMoments(np.sqrt(jj) / 2, 0.5, (jj - 1) / 4, 0.25, 0.0, float(n))
    raise DomainError(f"unknown input kind {kind!r}")


def output_moments(m, phi, penalty=NONE):
    """(<Jz>, Var Jz, d<Jz>/dphi) at the interferometer output."""
    c, s = np.cos(phi), np.sin(phi)
    eta = penalty.eta
    mean = eta * (c * m.mean_jz - s * m.mean_jx)
    var = eta ** 2 * (penalty.f * m.mean_n / 4 + c * c * m.var_jz + s * s * m.var_jx
                      - 2 * s * c * m.cov_xz)
    slope = eta * (-s * m.mean_jz - c * m.mean_jx)
    return float(mean), float(var), float(slope)


def precision(m, phi=np.pi / 2, penalty=NONE):
    """Delta Jz / |d<Jz>/dphi|; inf when the signal slope vanishes."""
    _, var, slope = output_moments(m, phi, penalty)
    if abs(slope) < 1e-300 or abs(slope) < 1e-14 * np.sqrt(max(var, 0.0)):
        return np.inf
    return float(np.sqrt(max(var, 0.0)) / abs(slope))


def coherent_squeezed_precision(alpha, r, phi=np.pi / 2, penalty=NONE):
    """Closed form for a coherent beam with real alpha and squeezed vacuum."""
    a2 = abs(alpha) ** 2
    sh2 = np.sinh(r) ** 2
    den = abs(a2 - sh2)
    if den == 0:
        return np.inf
    n = a2 + sh2
    s2 = np.sin(phi) ** 2
    if s2 == 0:
        return np.inf
    cot2 = np.cos(phi) ** 2 / s2
    num = (cot2 * (a2 + np.sinh(2 * r) ** 2 / 2) + a2 * np.exp(-2 * r) + sh2
           + penalty.f * n / s2)
    return float(np.sqrt(num) / den)


def coherent_squeezed_asymptote(mean_n, r, penalty=NONE):
    """sqrt(e^{-2r} + f)/sqrt(N) at phi = pi/2."""
    return float(np.sqrt(np.exp(-2 * r) + penalty.f) / np.sqrt(mean_n))


def optimal_coherent_squeezed(mean_n, penalty=NONE, phi=np.pi / 2):
    """Best split of mean_n photons between the two beams.

    Returns (r, Delta phi).  The search starts at sinh^2 r = sqrt(N)/2.
    """
    if mean_n <= 0:
        raise DomainError("mean photon number must be positive")
    rmax = np.arcsinh(np.sqrt(mean_n / 2))

    def cost(r):
        return coherent_squeezed_precision(np.sqrt(mean_n - np.sinh(r) ** 2), r, phi, penalty)

    guess = min(np.arcsinh(np.sqrt(np.sqrt(mean_n) / 2)), 0.9 * rmax)
    grid = np.linspace(0.0, 0.999 * rmax, 401)
    vals = np.array([cost(r) for r in grid])
    i = int(np.argmin(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    if not lo <= guess <= hi:
        guess = grid[i]
    res = optimize.minimize_scalar(cost, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-12})
    best = min([(res.x, res.fun), (guess, cost(guess)), (grid[i], vals[i])],
               key=lambda t: t[1])
    if not np.isfinite(best[1]):
        raise NumericError("no finite precision found")
    return float(best[0]), float(best[1])


def fabry_perot_phase(t, theta):
    """Equivalent interferometer phase 2 arcsin(T / sqrt(T^2 + 4(1-T) sin^2 theta))."""
    if not 0.0 < t <= 1.0:
        raise DomainError("transmission must lie in (0, 1]")
    return float(2 * np.arcsin(t / np.sqrt(t * t + 4 * (1 - t) * np.sin(theta) ** 2)))


def fabry_perot_map(t, theta):
    """(phi, Delta theta / Delta phi); the factor is inf when cos(theta) = 0 or T = 1."""
    phi = fabry_perot_phase(t, theta)
    cos = np.cos(theta)
    if abs(cos) < 1e-12 or t == 1.0:
        return phi, np.inf
    den = 4 * t * np.sqrt(1 - t) * cos
    if abs(den) < 1e-300:
        return phi, np.inf
    return phi, float(abs((t * t + 4 * (1 - t) * np.sin(theta) ** 2) / den))


def michelson_phase(phi_a, phi_b):
    """Light passes each arm twice, doubling the relative phase."""
    return 2 * (phi_b - phi_a)
