"""Brillouin-zone sweeps and the reports derived from them.

A sweep evaluates one solver route on a symmetric alpha grid. Band gaps,
k-gaps, reciprocity and the exact-versus-capacitance error are all computed
from the collected spectra alone.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, linear_sum_assignment

from .capacitance import static_bands
from .config import RunConfig
from .errors import EigenFailure, Resona1dError
from .exact import TruncationParams, exact_quasifrequencies
from .floquet import floquet_spectrum, monodromy, quasifrequencies_from_monodromy
from .muller import MullerConfig
from .perturbation import DEGENERACY_TOL, f1_block, m_first_order
from .spectrum import QuasifrequencySpectrum, fold, wrapped_distance

log = logging.getLogger(__name__)

K_GAP_TOL = 1e-9


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("RESONA1D_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------- solvers


def _static_point(alpha, config: RunConfig):
    w = static_bands(alpha, config.material.delta, config.chain, config.material, both_signs=True)
    return QuasifrequencySpectrum(alpha, w, "static", config.big_omega), {}


def _floquet_point(alpha, config: RunConfig):
    mono = monodromy(alpha, config.chain, config.material, config.modulation)
    return quasifrequencies_from_monodromy(mono, config.big_omega), {"det_error": mono.det_error}


def _exact_point(alpha, config: RunConfig):
    res = exact_quasifrequencies(
        alpha, config.chain, config.material, config.modulation,
        TruncationParams(config.truncation_K),
        config=MullerConfig(tolerance=config.tolerances.muller, perturbation=config.seed_perturbation),
    )
    info = {"residual": float(res.residuals.max()) if res.residuals.size else 0.0,
            "seed_failures": len(res.failures)}
    return res.spectrum(), info


def _perturbative_point(alpha, config: RunConfig):
    """Static frequencies plus first-order splittings at degenerate points.

    Where A0 has a Jordan block (a zero static frequency) the first-order
    theory does not apply and the static spectrum is returned.
    """
    try:
        ex = m_first_order(alpha, config.chain, config.material, config.modulation)
    except EigenFailure as exc:
        spec, _ = _static_point(alpha, config)
        return QuasifrequencySpectrum(alpha, spec.omega, "perturbative", config.big_omega), \
            {"fallback": str(exc)}
    omega = ex.folded_frequencies.astype(complex)
    for pair in ex.degenerate_pairs(config.tolerances.degeneracy):
        blk = f1_block(ex, pair, config.tolerances.degeneracy)
        omega[list(pair)] += ex.epsilon * blk.quasifrequency_shifts
    return QuasifrequencySpectrum(alpha, omega, "perturbative", config.big_omega), {}


SOLVERS = {
    "static": _static_point,
    "floquet": _floquet_point,
    "exact": _exact_point,
    "perturbative": _perturbative_point,
}


# ---------------------------------------------------------------- sweeps


@dataclass(frozen=True)
class KGap:
    """Maximal alpha interval on which some band has |Im omega| above tolerance."""

    alpha_min: float
    alpha_max: float
    max_im: float
    paired: bool
    re_min: float = float("nan")
    re_max: float = float("nan")

    @property
    def length(self) -> float:
        return self.alpha_max - self.alpha_min


@dataclass(frozen=True)
class BandGap:
    """Interval of folded real frequencies reached by no band."""

    omega_min: float
    omega_max: float
    wraps: bool

    @property
    def width(self) -> float:
        return self.omega_max - self.omega_min


@dataclass(frozen=True)
class ReciprocityReport:
    """Reciprocity deviation and k-gap sizes on either side of alpha = 0.

    Each row of ``table`` pairs a k-gap track at alpha > 0 with the track
    at alpha < 0 sitting at the same real frequency, and lists both
    alpha-lengths. Side totals always agree, because the spectrum at -alpha
    is -conj of the one at alpha; the asymmetry shows up per frequency.
    """

    deviation: float
    left_k_gap_length: float
    right_k_gap_length: float
    table: list

    @property
    def asymmetry(self) -> float:
        return max((abs(r["right_length"] - r["left_length"]) for r in self.table), default=0.0)


@dataclass(eq=False)
class BandStructure:
    """Spectra of one route over the alpha grid.

    ``spectra[i]`` is None where the solver failed; ``failures`` maps the
    grid index to the error message.
    """

    grid: np.ndarray
    spectra: list
    method: str
    big_omega: float
    failures: dict = field(default_factory=dict)
    info: list = field(default_factory=list)

    @property
    def valid(self) -> np.ndarray:
        return np.array([s is not None for s in self.spectra])

    def width(self) -> int:
        return max((len(s) for s in self.spectra if s is not None), default=0)

    def as_array(self) -> np.ndarray:
        """Sorted spectra stacked into (n_alpha, n_bands); NaN marks missing values."""
        out = np.full((self.grid.size, self.width()), np.nan + 0j)
        for i, s in enumerate(self.spectra):
            if s is not None:
                out[i, :len(s)] = s.omega
        return out

    def continued(self) -> np.ndarray:
        return continue_bands(self)


def band_sweep(config: RunConfig, method: str | None = None, grid=None) -> BandStructure:
    """Evaluate ``method`` at every grid point.

    Failures are logged and recorded per point; the sweep carries on.
    Results are ordered by grid index whatever the thread count.
    """
    method = method or config.method
    if method not in SOLVERS:
        raise ValueError(f"unknown method {method!r}")
    grid = config.grid() if grid is None else np.asarray(grid, dtype=float)
    solver = SOLVERS[method]

    def run(alpha):
        try:
            return solver(float(alpha), config), None
        except (Resona1dError, np.linalg.LinAlgError) as exc:
            log.warning("%s failed at alpha=%.6g: %s", method, alpha, exc)
            return None, f"{type(exc).__name__}: {exc}"

    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, grid))
    else:
        results = [run(a) for a in grid]

    spectra, info, failures = [], [], {}
    for i, (out, err) in enumerate(results):
        if out is None:
            spectra.append(None)
            info.append({})
            failures[i] = err
        else:
            spectra.append(out[0])
            info.append(out[1])
    return BandStructure(grid, spectra, method, config.big_omega, failures, info)


def continue_bands(bands: BandStructure) -> np.ndarray:
    """Greedy nearest-neighbour continuation across the grid.

    Row i holds the values at grid[i]; column j follows one band. Distances
    use the wrapped real part, and ties go to the candidate whose imaginary
    part has the same sign.
    """
    arr = bands.as_array()
    out = np.full_like(arr, np.nan + 0j)
    prev = None
    for i in range(arr.shape[0]):
        row = arr[i]
        if np.all(np.isnan(row.real)):
            continue
        if prev is None:
            out[i] = row
            prev = row.copy()
            continue
        cand = []
        for a in range(prev.size):
            for b in range(row.size):
                if np.isnan(prev[a].real) or np.isnan(row[b].real):
                    continue
                d = float(wrapped_distance(prev[a], row[b], bands.big_omega))
                same = np.sign(prev[a].imag) == np.sign(row[b].imag)
                cand.append((d, not same, a, b))
        cand.sort()
        used_a, used_b = set(), set()
        for d, _, a, b in cand:
            if a in used_a or b in used_b:
                continue
            out[i, a] = row[b]
            used_a.add(a)
            used_b.add(b)
        prev = np.where(np.isnan(out[i].real), prev, out[i])
    return out


# ---------------------------------------------------------------- reports


def _runs(mask):
    """(start, stop) index pairs of maximal True runs, stop inclusive."""
    runs, start = [], None
    for i, flag in enumerate(mask):
        if flag and start is None:
            start = i
        if not flag and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(mask) - 1))
    return runs


def _paired(omega, tol):
    """Every growing mode has a decaying partner with the opposite Im part."""
    im = omega.imag
    for w in omega[np.abs(im) > tol]:
        partner = np.abs(omega.real - w.real) + np.abs(im + w.imag)
        if partner.min() > max(tol, 1e-6 * abs(w.imag)) + 1e-6 * abs(w.imag):
            return False
    return True


def _unstable(s, tol):
    return np.zeros(0, dtype=complex) if s is None else s.omega[np.abs(s.im) > tol]


def detect_k_gaps(bands: BandStructure, tolerance_im: float = K_GAP_TOL) -> list:
    """Maximal grid intervals where some quasifrequency has |Im omega| > tolerance."""
    hot = [_unstable(s, tolerance_im) for s in bands.spectra]
    gaps = []
    for a, b in _runs([h.size > 0 for h in hot]):
        seg = np.concatenate(hot[a:b + 1])
        gaps.append(KGap(float(bands.grid[a]), float(bands.grid[b]),
                         float(np.max(np.abs(seg.imag))),
                         all(_paired(s.omega, tolerance_im) for s in bands.spectra[a:b + 1]),
                         float(seg.real.min()), float(seg.real.max())))
    return gaps


def k_gap_tracks(bands: BandStructure, side: int, tolerance_im: float = K_GAP_TOL,
                 jump: float | None = None) -> list:
    """Unstable modes on one side of alpha = 0, chained into tracks.

    Modes at neighbouring grid points join the same track when their real
    parts are within ``jump`` (default Omega / 10, wrapped). Each track is a
    dict with the alpha extent, the real parts it visits and its peak |Im|.
    """
    jump = 0.1 * bands.big_omega if jump is None else jump
    idx = [i for i, a in enumerate(bands.grid) if (a >= 0 if side > 0 else a <= 0)]
    tracks, open_ = [], []
    for i in idx:
        hot = _unstable(bands.spectra[i], tolerance_im)
        modes = []
        for r in np.sort(hot.real):
            if all(wrapped_distance(r, m, bands.big_omega) > 1e-6 * bands.big_omega for m in modes):
                modes.append(float(r))
        still = []
        for r in modes:
            host = next((t for t in open_ if
                         wrapped_distance(t["re"][-1], r, bands.big_omega) < jump and t["last"] != i), None)
            if host is None:
                host = {"first": i, "last": i, "re": [], "max_im": 0.0}
                tracks.append(host)
            host["re"].append(float(r))
            host.setdefault("points", {}).setdefault(i, []).append(float(r))
            host["last"] = i
            close = wrapped_distance(hot, r, bands.big_omega) <= 1e-6 * bands.big_omega + np.abs(hot.imag)
            host["max_im"] = max(host["max_im"], float(np.max(np.abs(hot.imag[close]))))
            if host not in still:
                still.append(host)
        open_ = still
    for t in tracks:
        t["alpha_min"] = float(bands.grid[t["first"]])
        t["alpha_max"] = float(bands.grid[t["last"]])
        t["length"] = t["alpha_max"] - t["alpha_min"]
    return tracks


def _covered_intervals(bands: BandStructure):
    """Real-part intervals swept by the continued bands, split at the fold edge."""
    big = bands.big_omega
    half = 0.5 * big
    arr = bands.continued()
    out = []
    for j in range(arr.shape[1]):
        col = arr[:, j].real
        for i in range(col.size - 1):
            a, b = col[i], col[i + 1]
            if np.isnan(a) or np.isnan(b):
                if not np.isnan(a):
                    out.append((a, a))
                continue
            lo, hi = min(a, b), max(a, b)
            if hi - lo > half:
                # the band crossed the window edge between the two points
                out.append((-half, lo))
                out.append((hi, half))
            else:
                out.append((lo, hi))
        if col.size and not np.isnan(col[-1]):
            out.append((col[-1], col[-1]))
    return out


def detect_band_gaps(bands: BandStructure, resolution: float | None = None) -> list:
    """Maximal folded real-part intervals covered by no band.

    Gaps narrower than ``resolution`` (default 1e-6 Omega) are dropped.
    Gaps touching the window edge carry ``wraps=True``, since folding can
    cut one physical gap into two pieces.
    """
    big = bands.big_omega
    half = 0.5 * big
    resolution = 1e-6 * big if resolution is None else resolution
    cover = sorted(_covered_intervals(bands))
    gaps, cursor = [], -half
    for lo, hi in cover:
        if lo - cursor > resolution:
            gaps.append((cursor, lo))
        cursor = max(cursor, hi)
    if half - cursor > resolution:
        gaps.append((cursor, half))
    return [BandGap(float(lo), float(hi), bool(lo <= -half or hi >= half)) for lo, hi in gaps]


def _mirror_index(grid):
    lookup = {round(float(a), 14): i for i, a in enumerate(grid)}
    pairs = []
    for i, a in enumerate(grid):
        j = lookup.get(round(-float(a), 14))
        if j is None:
            raise ValueError("grid is not symmetric about 0")
        pairs.append(j)
    return np.array(pairs)


def spectrum_distance(a: QuasifrequencySpectrum, b: QuasifrequencySpectrum) -> float:
    """Largest matched distance between two spectra (optimal assignment)."""
    if len(a) == 0 or len(b) == 0:
        return 0.0
    d = wrapped_distance(a.omega[:, None], b.omega[None, :], a.big_omega)
    rows, cols = linear_sum_assignment(d)
    return float(d[rows, cols].max())


def _side_length(gaps, side):
    total = 0.0
    for g in gaps:
        lo, hi = g.alpha_min, g.alpha_max
        if side < 0:
            lo, hi = lo, min(hi, 0.0)
        else:
            lo, hi = max(lo, 0.0), hi
        total += max(hi - lo, 0.0)
    return total


def reciprocity_report(bands: BandStructure, tolerance_im: float = K_GAP_TOL) -> ReciprocityReport:
    """Largest |omega(alpha) - omega(-alpha)| and a left/right k-gap size table.

    k-gap size is the alpha-length of a track of unstable modes. Tracks at
    alpha > 0 are paired with tracks at alpha < 0 by an optimal assignment
    on the mean distance of their real parts at mirrored grid points; pairs
    further apart than Omega / 10 are split, and unpaired tracks count
    against a length of 0.
    """
    mirror = _mirror_index(bands.grid)
    dev = 0.0
    for i, j in enumerate(mirror):
        if j <= i:
            continue
        a, b = bands.spectra[i], bands.spectra[j]
        if a is None or b is None:
            continue
        dev = max(dev, spectrum_distance(a, b))
    gaps = detect_k_gaps(bands, tolerance_im)
    right = k_gap_tracks(bands, 1, tolerance_im)
    left = k_gap_tracks(bands, -1, tolerance_im)
    near = 0.1 * bands.big_omega
    cost = np.full((len(right), len(left)), np.inf)
    for p, r in enumerate(right):
        for q, l in enumerate(left):
            d = [min(float(wrapped_distance(x, y, bands.big_omega)) for x in xs for y in l["points"][mirror[i]])
                 for i, xs in r["points"].items() if mirror[i] in l["points"]]
            if d:
                cost[p, q] = float(np.mean(d))
    pairs = {}
    if cost.size:
        rows, cols = linear_sum_assignment(np.where(np.isfinite(cost), cost, 1e6))
        pairs = {p: q for p, q in zip(rows, cols) if cost[p, q] < near}
    table = []
    for p, r in enumerate(right):
        row = {"re_min": min(r["re"]), "re_max": max(r["re"]),
               "right_alpha": [r["alpha_min"], r["alpha_max"]], "right_length": r["length"],
               "left_alpha": None, "left_length": 0.0}
        if p in pairs:
            l = left[pairs[p]]
            row.update(left_alpha=[l["alpha_min"], l["alpha_max"]], left_length=l["length"])
        table.append(row)
    for q, l in enumerate(left):
        if q not in pairs.values():
            table.append({"re_min": min(l["re"]), "re_max": max(l["re"]), "right_alpha": None,
                          "right_length": 0.0, "left_alpha": [l["alpha_min"], l["alpha_max"]],
                          "left_length": l["length"]})
    return ReciprocityReport(dev, _side_length(gaps, -1), _side_length(gaps, 1), table)


@dataclass(frozen=True, eq=False)
class Comparison:
    err_abs: float
    per_alpha: np.ndarray
    exact: BandStructure
    capacitance: BandStructure
    max_residual: float


def compare_bands(exact: BandStructure, capacitance: BandStructure) -> Comparison:
    """Max over alpha and roots of the distance from each exact root to the nearest capacitance value."""
    per = np.full(exact.grid.size, np.nan)
    for i, (e, c) in enumerate(zip(exact.spectra, capacitance.spectra)):
        if e is None or c is None or len(e) == 0:
            continue
        d = wrapped_distance(e.omega[:, None], c.omega[None, :], exact.big_omega)
        per[i] = float(d.min(axis=1).max())
    residual = max((inf.get("residual", 0.0) for inf in exact.info), default=0.0)
    return Comparison(float(np.nanmax(per)), per, exact, capacitance, residual)


def compare_exact_vs_capacitance(config: RunConfig, grid=None) -> Comparison:
    exact = band_sweep(config, "exact", grid)
    cap = band_sweep(config, "floquet", grid)
    if exact.failures or cap.failures:
        raise Resona1dError(f"solver failures at grid indices {sorted({**exact.failures, **cap.failures})}")
    return compare_bands(exact, cap)


def max_det_error(bands: BandStructure) -> float:
    return max((inf.get("det_error", 0.0) for inf in bands.info), default=0.0)


def degenerate_points(bands: BandStructure, tol: float = DEGENERACY_TOL) -> list:
    """(alpha, omega) where two quasifrequencies coincide within tol * Omega."""
    out = []
    for a, s in zip(bands.grid, bands.spectra):
        if s is None:
            continue
        w = s.omega
        for i in range(len(w)):
            for j in range(i + 1, len(w)):
                if wrapped_distance(w[i], w[j], bands.big_omega) < tol * bands.big_omega:
                    out.append((float(a), complex(fold(w[i], bands.big_omega))))
    return out


def _branch_index(b: int, n: int) -> int:
    """Map an ascending static branch (of 2N) to the +s / -s ordering of the A0 basis."""
    return b - n if b >= n else 2 * n - 1 - b


def static_crossings(config: RunConfig, grid=None, tol: float | None = None) -> list:
    """Points where two folded static frequencies coincide.

    Branches are the 2N values +-sqrt(delta lambda_i) in ascending order.
    A pair crosses where their difference, folded into the window, changes
    sign without jumping across the window edge; brentq refines the
    crossing. Grid points where the pair already agrees within tol * Omega
    are reported as they are. ``pair`` holds the indices in the basis used
    by the perturbation module; clusters of more than two coinciding
    branches are reported once with their full index set.
    """
    tol = config.tolerances.degeneracy if tol is None else tol
    big = config.big_omega
    grid = config.grid() if grid is None else np.asarray(grid, dtype=float)
    n = config.n

    def branches(a):
        return static_bands(a, config.material.delta, config.chain, config.material, both_signs=True)

    def h(a, p, q):
        w = branches(a)
        return float(fold(w[p] - w[q], big))

    vals = np.array([branches(a) for a in grid])
    found = {}
    for p in range(2 * n):
        for q in range(p + 1, 2 * n):
            d = fold(vals[:, p] - vals[:, q], big)
            for i in range(grid.size):
                if abs(d[i]) < tol * big:
                    a = float(grid[i])
                elif i + 1 < grid.size and abs(d[i + 1]) >= tol * big and d[i] * d[i + 1] < 0 \
                        and abs(d[i] - d[i + 1]) < 0.5 * big:
                    a = float(brentq(h, grid[i], grid[i + 1], args=(p, q), xtol=1e-14, rtol=1e-15))
                else:
                    continue
                w = branches(a)
                w0 = float(fold(w[p], big))
                cluster = tuple(b for b in range(2 * n) if wrapped_distance(w[b], w0, big) < tol * big)
                found.setdefault((round(a, 12), cluster), {
                    "alpha": a, "branches": cluster, "multiplicity": len(cluster),
                    "pair": tuple(_branch_index(b, n) for b in cluster), "omega_0": w0})
    return [found[k] for k in sorted(found)]


# ---------------------------------------------------------------- timing


def _chain_config(config: RunConfig, n: int) -> RunConfig:
    """Equidistant chain of n copies of the first resonator, same modulation law."""
    mod = config.raw["modulation"]
    raw = {
        "chain": {"lengths": [config.raw["chain"]["lengths"][0]] * n,
                  "gaps": [config.raw["chain"]["gaps"][0]] * n},
        "modulation": {"Omega": mod["Omega"],
                       "eps_rho": mod["eps_rho"][0], "eps_kappa": mod["eps_kappa"][0],
                       "phi_rho": [np.pi / (i + 1) for i in range(n)],
                       "phi_kappa": [np.pi / (i + 1) for i in range(n)]},
    }
    return config.replace(**raw)


def _time(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def runtime_table(config: RunConfig, ks=(1, 2, 4, 8), ns=(1, 2, 4, 6), alphas=(0.3,), repeats=2) -> list:
    """Wall-clock time of the exact and capacitance routes versus K and N.

    Rows are dicts with keys ``axis`` ('K' or 'N'), ``value``, ``exact_s``
    and ``capacitance_s``; times are the best of ``repeats`` runs summed
    over ``alphas`` (scaled into each chain's Brillouin zone).
    """
    rows = []

    def measure(cfg, K):
        zone = np.pi / cfg.chain.period
        pts = [a * zone for a in alphas]
        ex = _time(lambda: [exact_quasifrequencies(a, cfg.chain, cfg.material, cfg.modulation,
                                                   TruncationParams(K)) for a in pts], repeats)
        cap = _time(lambda: [floquet_spectrum(a, cfg.chain, cfg.material, cfg.modulation) for a in pts], repeats)
        return ex, cap

    for K in ks:
        ex, cap = measure(config, K)
        rows.append({"axis": "K", "value": int(K), "n": config.n, "K": int(K), "exact_s": ex, "capacitance_s": cap})
    for n in ns:
        cfg = _chain_config(config, n)
        ex, cap = measure(cfg, config.truncation_K)
        rows.append({"axis": "N", "value": int(n), "n": int(n), "K": config.truncation_K,
                     "exact_s": ex, "capacitance_s": cap})
    return rows
