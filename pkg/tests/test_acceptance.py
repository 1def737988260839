"""Acceptance criteria, each checked at its stated tolerance.

Every test prints one ``PASS``/``FAIL`` line (visible in ``pytest -v`` output,
or run this file directly with ``python3 tests/test_acceptance.py``).
"""

import sys
from functools import lru_cache

import numpy as np
import pytest

from resona1d.analysis import (
    band_sweep, compare_exact_vs_capacitance, detect_k_gaps, max_det_error, reciprocity_report,
    runtime_table, spectrum_distance,
)
from resona1d.capacitance import static_bands
from resona1d.config import load_preset, preset_names
from resona1d.model import Modulation, ResonatorChain, MaterialConstants
from resona1d.muller import find_root
from resona1d.perturbation import gap_size_estimate, m_first_order, measured_splitting, static_crossing_alpha
from resona1d.spectrum import QuasifrequencySpectrum, fold

_CAPSYS = None


def report(criterion, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    if _CAPSYS is not None:
        with _CAPSYS.disabled():
            print("\n" + line)
    else:
        print(line)
    return ok


@pytest.fixture(autouse=True)
def _visible(capsys):
    global _CAPSYS
    _CAPSYS = capsys
    yield
    _CAPSYS = None


@lru_cache(maxsize=None)
def comparison(name, K=None):
    cfg = load_preset(name)
    if K is not None:
        cfg = cfg.replace(truncation_K=K)
    return compare_exact_vs_capacitance(cfg)


@lru_cache(maxsize=None)
def floquet_bands(name):
    return band_sweep(load_preset(name), "floquet")


def test_1_exact_vs_capacitance():
    comp = comparison("trio-modulated")
    ok = comp.err_abs <= 5e-6
    assert report(1, ok, f"trio-modulated err_abs = {comp.err_abs:.3e} (<= 5e-6)")


def test_2_truncation_monotone():
    errs = [comparison("single-modulated", K).err_abs for K in (1, 2, 3)]
    ok = errs[0] > errs[1] > errs[2]
    assert report(2, ok, "err_abs(K=1,2,3) = " + ", ".join(f"{e:.3e}" for e in errs) + " (strictly decreasing)")


def test_3_static_degeneracy():
    eq, uneven = load_preset("equidistant-static"), load_preset("uneven-static")
    w_eq = static_bands(0.0, eq.material.delta, eq.chain, eq.material)
    w_un = static_bands(0.0, uneven.material.delta, uneven.chain, uneven.material)
    touch = float(np.min(np.abs(np.diff(w_eq))))
    apart = float(np.min(np.abs(np.diff(w_un))))
    ok = touch <= 1e-10 and apart > 1e-4 * uneven.big_omega
    assert report(3, ok, f"equidistant gap {touch:.2e} (<= 1e-10), uneven gap {apart:.3e} "
                         f"(> {1e-4 * uneven.big_omega:.1e})")


@pytest.mark.parametrize("name", ["uneven-kappa", "equidistant-kappa"])
def test_4_k_gaps_and_nonreciprocity(name):
    bands = floquet_bands(name)
    cfg = load_preset(name)
    gaps = detect_k_gaps(bands, cfg.tolerances.k_gap)
    rep = reciprocity_report(bands, cfg.tolerances.k_gap)
    h = float(bands.grid[1] - bands.grid[0])
    a = bool(gaps) and all(g.paired for g in gaps)
    b = rep.deviation > 1e-4
    c = rep.asymmetry > 0.5 * h
    report("4a", a, f"{name}: {len(gaps)} k-gap intervals, all paired +-Im: {a}")
    report("4b", b, f"{name}: reciprocity deviation {rep.deviation:.3e} (> 1e-4)")
    report("4c", c, f"{name}: k-gap length asymmetry {rep.asymmetry:.4f} "
                    f"(> half grid spacing {0.5 * h:.4f})")
    assert a and b and c


def test_5_static_limit_identity():
    worst = 0.0
    for name in ("uneven-static", "equidistant-static"):
        cfg = load_preset(name)
        assert cfg.alpha_grid == 101
        for spec in floquet_bands(name).spectra:
            # static_bands already carries the v_r factor
            w = static_bands(spec.alpha, cfg.material.delta, cfg.chain, cfg.material, both_signs=True)
            ref = QuasifrequencySpectrum(spec.alpha, fold(w, cfg.big_omega), "static", cfg.big_omega)
            worst = max(worst, spectrum_distance(spec, ref))
    ok = worst <= 1e-8
    assert report(5, ok, f"max |floquet - folded static| = {worst:.2e} (<= 1e-8, 101 points)")


def test_6_liouville():
    worst = {name: max_det_error(floquet_bands(name)) for name in preset_names()}
    top = max(worst.values())
    ok = top <= 1e-8
    assert report(6, ok, f"max |det X_T - 1| = {top:.2e} over {', '.join(sorted(worst))} (<= 1e-8)")


SINGLE = ResonatorChain([1.0], [1.0])
MAT = MaterialConstants.from_speeds(1e-4)
BIG = 0.015


def _splitting_errors(fraction):
    alpha = static_crossing_alpha(SINGLE, MAT, 0, fraction * BIG, (1e-6, np.pi / 2))
    errs = []
    for eps in (0.08, 0.04, 0.02):
        mod = Modulation.uniform(1, BIG, eps, eps)
        ex = m_first_order(alpha, SINGLE, MAT, mod)
        est = gap_size_estimate(ex, (0, 1))
        meas = measured_splitting(alpha, SINGLE, MAT, mod, ex.folded_frequencies[0])
        errs.append(abs(meas - est))
    return alpha, errs


def test_7_perturbation_order():
    # +omega and -omega of a single resonator meet after folding where 2 omega = 2 Omega
    alpha, errs = _splitting_errors(1.0)
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    ok = all(2.5 <= r <= 6 for r in ratios)
    report(7, ok, f"r=2 point alpha={alpha:.5f}, folding gap 2: errors "
                  + ", ".join(f"{e:.3e}" for e in errs) + " ratios " + ", ".join(f"{r:.3f}" for r in ratios)
                  + " (in [2.5, 6])")
    # diagnostic only: with a folding gap of 1 the error is odd in eps and shrinks as eps^3
    a1, e1 = _splitting_errors(0.5)
    with _CAPSYS.disabled():
        print(f"     diagnostic: folding gap 1 at alpha={a1:.5f}: ratios "
              f"{e1[0] / e1[1]:.3f}, {e1[1] / e1[2]:.3f}")
    assert ok


def test_8_muller_residuals():
    resid = max(comparison("trio-modulated").max_residual, *(comparison("single-modulated", K).max_residual for K in (1, 2, 3)))
    quad = []
    for f in (lambda z: z * z + 1, lambda z: z * z - 2):
        r = find_root(f, (0.5, 1.0, 1.5))
        quad.append((abs(r.value), r.iterations))
    ok = resid <= 1e-10 and all(v <= 1e-12 and it <= 20 for v, it in quad)
    assert report(8, ok, f"max exact residual {resid:.2e} (<= 1e-10); z^2+1: |f|={quad[0][0]:.1e} in "
                         f"{quad[0][1]} it; z^2-2: |f|={quad[1][0]:.1e} in {quad[1][1]} it")


def test_9_runtime_shape():
    rows = runtime_table(load_preset("trio-modulated"))
    ok = True
    parts = []
    for axis in ("K", "N"):
        sel = [r for r in rows if r["axis"] == axis]
        grow = sel[-1]["exact_s"] / sel[0]["exact_s"]
        span = sel[-1]["value"] / sel[0]["value"]
        ok &= grow > span
        parts.append(f"exact time x{grow:.1f} over {axis} x{span:g}")
    faster = all(r["capacitance_s"] < r["exact_s"] for r in rows if r["axis"] == "N" and r["value"] >= 2)
    ok &= faster
    parts.append(f"capacitance faster for N>=2: {faster}")
    assert report(9, ok, "; ".join(parts))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
