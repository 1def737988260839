import numpy as np
import pytest
from scipy.optimize import brentq

from resona1d.capacitance import static_bands
from resona1d.errors import ResonantModeCollision
from resona1d.exact import (
    ExactProblem, TruncationParams, exact_quasifrequencies, interior_eigenbasis, interior_matrices,
)
from resona1d.floquet import floquet_spectrum
from resona1d.model import MaterialConstants, Modulation, ResonatorChain
from resona1d.spectrum import wrapped_distance


def transfer(k, d, rho):
    return np.array([[np.cos(k * d), rho * np.sin(k * d) / k],
                     [-k * np.sin(k * d) / rho, np.cos(k * d)]])


def dispersion(omega, alpha, chain, delta, v0=1.0, vr=1.0):
    """Half trace of the cell transfer matrix minus cos(alpha L); zero on a static band."""
    m = np.eye(2)
    for ell, gap in zip(chain.lengths, chain.gaps):
        m = transfer(omega / v0, gap, 1.0) @ transfer(omega / vr, ell, delta) @ m
    return 0.5 * np.trace(m) - np.cos(alpha * chain.period)


@pytest.mark.parametrize("lengths,gaps", [([1.0], [1.0]), ([1.0, 0.8], [1.0, 1.7])])
@pytest.mark.parametrize("alpha", [0.3, 0.9])
def test_static_roots_match_transfer_matrix(lengths, gaps, alpha):
    chain = ResonatorChain(lengths, gaps)
    mat = MaterialConstants.from_speeds(1e-4)
    a = alpha * np.pi / chain.period
    res = exact_quasifrequencies(a, chain, mat, Modulation.static(chain.n, 0.05), TruncationParams(2))
    positive = np.sort(res.roots[res.roots.real > 0].real)
    approx = static_bands(a, 1e-4, chain, mat)
    assert positive.size == chain.n
    for w, guess in zip(positive, approx):
        ref = brentq(dispersion, 0.9 * guess, 1.1 * guess, args=(a, chain, 1e-4), xtol=1e-16)
        assert w == pytest.approx(ref, rel=1e-11)


def test_interior_basis_is_plane_waves_without_modulation():
    mat = MaterialConstants.from_speeds(1e-4, vr=2.0)
    mod = Modulation.static(1, 0.05)
    basis = interior_eigenbasis(0, 0.013, mat, mod, TruncationParams(2))
    expected = (0.013 + basis.modes * 0.05) / 2.0
    np.testing.assert_allclose(basis.roots, expected, rtol=1e-12)
    np.testing.assert_allclose(basis.vectors, np.eye(5), atol=1e-12)


def test_interior_matrices_banded():
    mod = Modulation.uniform(1, 0.05, 0.4, 0.4, 0.3, 0.3)
    a, b = interior_matrices(0, 0.01, MaterialConstants.from_speeds(1e-4), mod, TruncationParams(3))
    assert np.allclose(np.triu(a, 2), 0) and np.allclose(np.tril(a, -2), 0)
    np.testing.assert_allclose(np.diag(a), 1.0)


def test_mode_collision_guard():
    mod = Modulation.uniform(1, 0.05, 0.4, 0.4)
    with pytest.raises(ResonantModeCollision):
        interior_matrices(0, 0.05, MaterialConstants.from_speeds(1e-4), mod, TruncationParams(1))


def test_alpha_zero_keeps_the_constant_mode():
    chain = ResonatorChain([1.0], [1.0])
    res = exact_quasifrequencies(0.0, chain, MaterialConstants.from_speeds(1e-4),
                                 Modulation.uniform(1, 0.05, 0.4, 0.4), TruncationParams(2))
    assert np.any(np.abs(res.roots) == 0)


@pytest.mark.parametrize("alpha", [-1.2, 0.4, 1.5])
def test_modulated_roots_agree_with_capacitance_route(alpha):
    chain = ResonatorChain([1.0], [1.0])
    mat = MaterialConstants.from_speeds(1e-4)
    mod = Modulation.uniform(1, 0.05, 0.4, 0.4)
    res = exact_quasifrequencies(alpha, chain, mat, mod, TruncationParams(3))
    cap = floquet_spectrum(alpha, chain, mat, mod)
    assert res.roots.size == 2
    assert np.all(res.residuals <= 1e-10)
    for w in res.roots:
        assert np.min(wrapped_distance(w, cap.omega, 0.05)) < 5e-6
    prob = ExactProblem(alpha, chain, mat, mod, TruncationParams(3))
    for w in res.roots:
        assert prob.objective(w) <= 1e-10
        assert prob.smallest_singular_value(w) <= 1e-8
