import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import optimize

from conftest import random_density, random_hermitian
from qmetro.errors import DomainError, InconsistentDerivativeError
from qmetro.fock_core import build_j_operators, make_named_state
from qmetro.channels import phase_diffusion_apply, PhaseDiffusionParams
from qmetro.qfi import (finite_difference, fidelity, optimal_purification_lambda,
                        phase_diffusion_purification_bound, purification_objective,
                        qfi_mixed, qfi_pure, qfi_unitary, sld_residual)


def _jz_family(state):
    c = state.coeffs
    jz = build_j_operators(state.n_total).jz
    return c, -1j * jz @ c


@pytest.mark.parametrize("n", [1, 2, 5, 10, 30, 50])
def test_noon_and_balanced(n):
    assert abs(qfi_pure(*_jz_family(make_named_state("noon", n))) - n * n) < 1e-9 * n * n
    assert abs(qfi_pure(*_jz_family(make_named_state("balanced", n))) - n) < 1e-9 * n


def test_global_phase_drift_is_invisible():
    c = make_named_state("sine", 4).coeffs
    assert abs(qfi_pure(c, 0.3j * c)) < 1e-14


def test_norm_violation_is_rejected():
    c = make_named_state("sine", 4).coeffs
    with pytest.raises(InconsistentDerivativeError):
        qfi_pure(c, 0.1 * c)
    with pytest.raises(DomainError):
        qfi_pure(2 * c, c)


def test_mixed_agrees_with_pure(rng):
    for _ in range(5):
        psi = rng.normal(size=6) + 1j * rng.normal(size=6)
        psi /= np.linalg.norm(psi)
        h = random_hermitian(rng, 6)
        dpsi = -1j * h @ psi
        rho = np.outer(psi, psi.conj())
        drho = np.outer(dpsi, psi.conj()) + np.outer(psi, dpsi.conj())
        assert abs(qfi_mixed(rho, drho).value - qfi_pure(psi, dpsi)) < 1e-10


def test_phase_diffused_noon():
    for n, gamma in [(2, 0.1), (4, 0.05), (6, 0.02)]:
        s = make_named_state("noon", n)
        rho = phase_diffusion_apply(s, PhaseDiffusionParams(gamma))
        k = np.arange(n + 1.0)
        drho = -1j * (np.diag(k) @ rho - rho @ np.diag(k))
        # the two-level block has coherence e^{-Gamma N^2/2}
        assert abs(qfi_mixed(rho, drho).value - n * n * np.exp(-gamma * n * n)) < 1e-10


def test_unitary_formula(rng):
    rho = random_density(rng, 6)
    h = random_hermitian(rng, 6)
    drho = -1j * (h @ rho - rho @ h)
    assert abs(qfi_unitary(rho, h) - qfi_mixed(rho, drho).value) < 1e-8
    assert qfi_unitary(np.eye(4) / 4, random_hermitian(rng, 4)) == 0
    psi = rng.normal(size=5) + 0j
    psi /= np.linalg.norm(psi)
    h = random_hermitian(rng, 5)
    var = np.vdot(psi, h @ h @ psi).real - np.vdot(psi, h @ psi).real ** 2
    assert abs(qfi_unitary(np.outer(psi, psi.conj()), h) - 4 * var) < 1e-10


def test_input_validation(rng):
    rho = random_density(rng, 3)
    with pytest.raises(DomainError):
        qfi_mixed(rho, rng.normal(size=(3, 3)))
    with pytest.raises(DomainError):
        qfi_mixed(rho, np.eye(3))
    with pytest.raises(DomainError):
        qfi_unitary(rho, np.ones((3, 2)))


@given(st.integers(0, 10 ** 6))
def test_sld_relation(seed):
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(2, 7))
    rank = int(rng.integers(1, dim + 1))
    rho = random_density(rng, dim, rank)
    h = random_hermitian(rng, dim)
    drho = -1j * (h @ rho - rho @ h)
    res = qfi_mixed(rho, drho)
    assert sld_residual(rho, drho, res.sld) < 1e-8
    assert np.max(np.abs(res.sld - res.sld.conj().T)) < 1e-10
    assert abs(res.value - np.trace(rho @ res.sld @ res.sld).real) < 1e-8


def test_fidelity_basics(rng):
    rho = random_density(rng, 4)
    assert abs(fidelity(rho, rho) - 1) < 1e-10
    a = np.diag([1.0, 0, 0])
    b = np.diag([0, 1.0, 0])
    assert fidelity(a, b) < 1e-12


def test_fidelity_expansion(rng):
    rho0 = random_density(rng, 4)
    h = random_hermitian(rng, 4)

    def fam(phi):
        w, v = np.linalg.eigh(h)
        u = (v * np.exp(-1j * phi * w)) @ v.conj().T
        return u @ rho0 @ u.conj().T

    delta = 1e-3
    f_q = qfi_unitary(rho0, h)
    coeff = (1 - fidelity(fam(0.0), fam(delta))) / delta ** 2
    assert abs(coeff - f_q / 4) < 0.01 * f_q / 4


@given(st.integers(0, 10 ** 6))
def test_monotone_under_channels(seed):
    from qmetro.channels import KrausChannel
    rng = np.random.default_rng(seed)
    rho = random_density(rng, 3)
    h = random_hermitian(rng, 3)
    drho = -1j * (h @ rho - rho @ h)
    # random channel from an isometry 3 -> 3*2
    g = rng.normal(size=(6, 3)) + 1j * rng.normal(size=(6, 3))
    iso, _ = np.linalg.qr(g)
    ch = KrausChannel((iso[:3], iso[3:]))
    assert qfi_mixed(ch.apply(rho), ch.apply(drho)).value <= qfi_mixed(rho, drho).value + 1e-8


@given(st.integers(0, 10 ** 6), st.floats(0, 1))
def test_convexity(seed, p):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, 4)
    r1, r2 = random_density(rng, 4), random_density(rng, 4)
    mix = p * r1 + (1 - p) * r2
    assert qfi_unitary(mix, h) <= p * qfi_unitary(r1, h) + (1 - p) * qfi_unitary(r2, h) + 1e-8


def test_additivity(rng):
    rho = random_density(rng, 3)
    h = random_hermitian(rng, 3)
    big = np.kron(rho, rho)
    hh = np.kron(h, np.eye(3)) + np.kron(np.eye(3), h)
    assert abs(qfi_unitary(big, hh) - 2 * qfi_unitary(rho, h)) < 1e-8


def test_finite_difference_cross_check(rng):
    rho0 = random_density(rng, 3)
    h = random_hermitian(rng, 3)

    def fam(phi):
        w, v = np.linalg.eigh(h)
        u = (v * np.exp(-1j * phi * w)) @ v.conj().T
        return u @ rho0 @ u.conj().T

    drho = finite_difference(fam, 0.0)
    assert abs(qfi_mixed(rho0, drho).value - qfi_unitary(rho0, h)) < 1e-6


def test_purification_bound():
    for v in (0.3, 2.0, 25.0):
        assert phase_diffusion_purification_bound(v, 0.0) == 4 * v
        lam_num = optimize.minimize_scalar(lambda x: purification_objective(v, 0.07, x),
                                           bracket=(0, 1), tol=1e-12).x
        assert abs(lam_num - optimal_purification_lambda(v, 0.07)) < 1e-8
        best = purification_objective(v, 0.07, optimal_purification_lambda(v, 0.07))
        assert abs(best - phase_diffusion_purification_bound(v, 0.07)) < 1e-12
    n, gamma = 10, 0.03
    bound = phase_diffusion_purification_bound(n * n / 4, gamma)
    assert abs(1 / np.sqrt(bound) - np.sqrt(gamma + 1 / n ** 2)) < 1e-12
    with pytest.raises(DomainError):
        phase_diffusion_purification_bound(-1, 0.1)
