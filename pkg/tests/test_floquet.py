import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resona1d.capacitance import generalized_capacitance, static_bands
from resona1d.floquet import (
    Monodromy, ModulatedOperator, floquet_spectrum, monodromy, multipliers,
    quasifrequencies_from_monodromy, w3_diagonal,
)
from resona1d.model import MaterialConstants, Modulation, ResonatorChain
from resona1d.spectrum import fold, wrapped_distance

MAT = MaterialConstants.from_speeds(1e-4)
TRIO = ResonatorChain([1.0, 1.0, 1.0], [1.0, 1.0, 2.0])
PH = [0.0, np.pi / 2, np.pi]


@given(eps=st.floats(0.0, 0.8), phi=st.floats(-np.pi, np.pi), t=st.floats(0.0, 200.0))
def test_w3_matches_closed_form(eps, phi, t):
    om = 0.03
    mod = Modulation.uniform(1, om, 0.0, eps, 0.0, phi)
    c = np.cos(om * t + phi)
    expected = om**2 / 4 * (2 * eps * c + eps**2 * c**2 + eps**2) / (1 + eps * c) ** 2
    assert w3_diagonal(mod, t)[0] == pytest.approx(expected, abs=1e-15)


def test_operator_reduces_to_scaled_capacitance_without_modulation():
    op = ModulatedOperator(0.2, TRIO, MAT, Modulation.static(3, 0.03))
    assert op.is_constant
    np.testing.assert_allclose(op(5.0), 1e-4 * generalized_capacitance(0.2, TRIO, MAT), atol=1e-18)


@given(frac=st.floats(-1.0, 1.0))
def test_static_limit_matches_capacitance_bands(frac):
    alpha = frac * np.pi / TRIO.period
    spec = floquet_spectrum(alpha, TRIO, MAT, Modulation.static(3, 0.03))
    ref = fold(static_bands(alpha, 1e-4, TRIO, MAT, both_signs=True), 0.03)
    d = wrapped_distance(spec.omega[:, None], ref[None, :], 0.03)
    assert d.min(axis=1).max() <= 1e-8
    assert d.min(axis=0).max() <= 1e-8


@pytest.mark.parametrize("alpha", [0.0, 0.17, -0.31])
def test_liouville_and_integrator_agreement(alpha):
    mod = Modulation.uniform(3, 0.03, 0.0, 0.2, PH, PH)
    dop = monodromy(alpha, TRIO, MAT, mod)
    rk = monodromy(alpha, TRIO, MAT, mod, method="rk4", rk4_steps=4000)
    assert dop.det_error <= 1e-8
    a = quasifrequencies_from_monodromy(dop, 0.03).omega
    b = quasifrequencies_from_monodromy(rk, 0.03).omega
    d = wrapped_distance(a[:, None], b[None, :], 0.03)
    assert d.min(axis=1).max() < 1e-7


@pytest.mark.parametrize("alpha", [0.05, 0.2, 0.4])
def test_negative_alpha_is_minus_conjugate(alpha):
    mod = Modulation.uniform(3, 0.03, 0.0, 0.2, PH, PH)
    plus = floquet_spectrum(alpha, TRIO, MAT, mod).omega
    minus = floquet_spectrum(-alpha, TRIO, MAT, mod).omega
    d = wrapped_distance(-np.conj(plus)[:, None], minus[None, :], 0.03)
    assert d.min(axis=1).max() < 1e-9


def test_defective_pair_at_alpha_zero_is_merged():
    mod = Modulation.uniform(3, 0.03, 0.0, 0.2, PH, PH)
    spec = floquet_spectrum(0.0, TRIO, MAT, mod)
    assert np.max(np.abs(spec.im)) < 1e-9


def test_merge_leaves_separated_multipliers_alone():
    mono = Monodromy(np.diag([2.0, 0.5, 1.0 + 1e-3, 1.0 - 1e-3]).astype(complex), 1.0, 0.0)
    mu = multipliers(mono, radius=1e-6)
    np.testing.assert_allclose(np.sort(mu.real), [0.5, 1 - 1e-3, 1 + 1e-3, 2.0])
    merged = multipliers(mono, radius=1e-2)
    np.testing.assert_allclose(np.sort(merged.real), [0.5, 1.0, 1.0, 2.0])
