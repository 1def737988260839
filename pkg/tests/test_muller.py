import cmath

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resona1d.errors import NoConvergence
from resona1d.muller import MullerConfig, find_root, seeds_from_static


@pytest.mark.parametrize("poly,roots", [
    (lambda z: z * z + 1, (1j, -1j)),
    (lambda z: z * z - 2, (np.sqrt(2), -np.sqrt(2))),
])
def test_quadratics_converge_fast(poly, roots):
    res = find_root(poly, (0.5, 1.0, 1.5))
    assert abs(res.value) <= 1e-12
    assert min(abs(res.root - r) for r in roots) <= 1e-12
    assert res.iterations <= 20


@given(re=st.floats(-3, 3), im=st.floats(-3, 3))
def test_finds_roots_of_shifted_cubic(re, im):
    target = complex(re, im)
    f = lambda z: (z - target) * (z * z + 4)  # noqa: E731
    seeds = (target + 0.1, target + 0.1j, target - 0.05)
    res = find_root(f, seeds)
    assert abs(res.value) <= 1e-12
    assert abs(res.root - target) < 1e-8 or abs(res.root * res.root + 4) < 1e-8


def test_real_seeds_reach_complex_roots():
    res = find_root(lambda z: z * z + 2 * z + 5, (0.0, 1.0, 2.0))
    assert min(abs(res.root - r) for r in (-1 + 2j, -1 - 2j)) < 1e-10


def test_seed_validation():
    with pytest.raises(ValueError):
        find_root(lambda z: z, (1, 1, 2))
    with pytest.raises(ValueError):
        find_root(lambda z: z, (1, 2))


def test_iteration_budget():
    cfg = MullerConfig(max_iterations=3)
    with pytest.raises(NoConvergence):
        find_root(cmath.exp, (1, 2, 3), cfg)  # no zeros anywhere


def test_excluded_points_are_stepped_around():
    class Pole(Exception):
        pass

    def f(z):
        if abs(z - 1.0) < 1e-12:
            raise Pole
        return z * z - 4

    res = find_root(f, (1.0, 1.5, 3.0), off_domain=(Pole,))
    assert abs(res.root - 2) < 1e-10


def test_seeds_from_static():
    s = seeds_from_static(4.0, 1e-4, 1.0)
    assert s[0] == pytest.approx(0.02)
    assert len(set(s)) == 3
    neg = seeds_from_static(4.0, 1e-4, 1.0, sign=-1)
    assert neg[0] == pytest.approx(-0.02)
    zero = seeds_from_static(0.0, 1e-4, 1.0)
    assert len(set(zero)) == 3
    with pytest.raises(ValueError):
        seeds_from_static(-1.0, 1e-4, 1.0)
