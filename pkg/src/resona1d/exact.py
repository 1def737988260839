"""Truncated exact solver: interior mode coupling, DtN boundary conditions and
the nonlinear eigenvalue problem A*(omega, delta) w = 0.

Fourier modes n = K..-K are stored top to bottom, so mode n lives at array
index K - n. Inside resonator i the mode vector satisfies
A_i v'' + B_i v = 0, solved through the eigenpairs of C_i = A_i^{-1} B_i.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import dtn
from .capacitance import generalized_eigenvalues
from .errors import EigenFailure, NoConvergence, ResonantModeCollision, SingularGap
from .model import MaterialConstants, Modulation, ResonatorChain
from .muller import MullerConfig, find_root, seeds_from_static
from .spectrum import QuasifrequencySpectrum, fold, wrapped_distance

log = logging.getLogger(__name__)

MODE_GUARD = 1e-12
DEDUP_RADIUS = 1e-10


@dataclass(frozen=True)
class TruncationParams:
    K: int = 3

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("truncation order K must be at least the Fourier cutoff M = 1")

    @property
    def size(self) -> int:
        return 2 * self.K + 1

    @property
    def modes(self) -> np.ndarray:
        return np.arange(self.K, -self.K - 1, -1)


def _as_trunc(trunc) -> TruncationParams:
    return trunc if isinstance(trunc, TruncationParams) else TruncationParams(int(trunc))


def interior_matrices(i: int, omega: complex, material: MaterialConstants,
                      modulation: Modulation, trunc=TruncationParams()):
    """Banded matrices A_i (coefficients of 1/rho_i) and B_i (gamma coefficients).

    B_i[n, n-m] = (omega + (n-m) Omega) / (omega + n Omega) * k_{i,m} * (k_r^n)^2.
    """
    trunc = _as_trunc(trunc)
    big = modulation.omega
    modes = trunc.modes
    shifted = omega + modes * big
    if np.min(np.abs(shifted)) < MODE_GUARD:
        n_bad = modes[np.argmin(np.abs(shifted))]
        raise ResonantModeCollision(f"omega + n*Omega vanishes for n = {n_bad}")
    r, k = modulation.reciprocal_fourier_coefficients(i)
    cutoff = modulation.fourier_cutoff
    size = trunc.size
    a = np.zeros((size, size), dtype=complex)
    b = np.zeros((size, size), dtype=complex)
    kr2 = (shifted / material.vr) ** 2
    for m in range(-cutoff, cutoff + 1):
        # row p holds mode n = K - p; column p + m holds mode n - m
        rows = np.arange(max(0, -m), min(size, size - m))
        cols = rows + m
        a[rows, cols] = r[m + cutoff]
        ratio = (omega + (modes[rows] - m) * big) / shifted[rows]
        b[rows, cols] = ratio * k[m + cutoff] * kr2[rows]
    return a, b


@dataclass(frozen=True, eq=False)
class InteriorEigenbasis:
    """Eigenpairs of C_i, one per Fourier mode.

    Column j of ``vectors`` belongs to the mode ``modes[j]`` on which it
    concentrates and is scaled so that this entry equals 1. ``roots`` are
    the square roots of ``eigenvalues`` on the branch continuous in omega,
    i.e. the sign closest to the mode wavenumber k_r^n.
    """

    eigenvalues: np.ndarray
    roots: np.ndarray
    vectors: np.ndarray
    modes: np.ndarray
    matrix: np.ndarray


def interior_eigenbasis(i, omega, material, modulation, trunc=TruncationParams()) -> InteriorEigenbasis:
    trunc = _as_trunc(trunc)
    a, b = interior_matrices(i, omega, material, modulation, trunc)
    c = np.linalg.solve(a, b)
    try:
        lam, vec = np.linalg.eig(c)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    if not np.all(np.isfinite(lam)):
        raise EigenFailure("non-finite eigenvalues")
    # match eigenvectors to modes so the basis varies smoothly with omega
    weight = -np.log(np.abs(vec) + 1e-300)
    rows, cols = linear_sum_assignment(weight)
    order = cols[np.argsort(rows)]
    lam = lam[order]
    vec = vec[:, order]
    vec = vec / np.diag(vec)[None, :]
    roots = np.sqrt(lam.astype(complex))
    k_mode = (omega + trunc.modes * modulation.omega) / material.vr
    flip = np.real(roots * np.conj(k_mode)) < 0
    roots = np.where(flip, -roots, roots)
    return InteriorEigenbasis(lam, roots, vec, trunc.modes, c)


@dataclass(frozen=True, eq=False)
class AssembledSystem:
    matrix: np.ndarray
    omega: complex
    alpha: float


def assemble_a_star(omega, alpha, delta, chain: ResonatorChain, material: MaterialConstants,
                    modulation: Modulation, trunc=TruncationParams()) -> AssembledSystem:
    """Square matrix of size 2N(2K+1) whose kernel gives the mode coefficients.

    Row group n (n = K..-K) is [G^{n,j} - delta T^{k^n} V^{n,j}] over columns
    j = K..-K, with columns (a_j^i, b_j^i) for i = 1..N inside each group.
    """
    trunc = _as_trunc(trunc)
    n_res = chain.n
    size = trunc.size
    cutoff = modulation.fourier_cutoff
    bases = [interior_eigenbasis(i, omega, material, modulation, trunc) for i in range(n_res)]
    dim = 2 * n_res * size

    # boundary traces, shape (N, 2 boundaries, 2 columns a/b, modes j)
    traces = np.empty((n_res, 2, 2, size), dtype=complex)
    slopes = np.empty_like(traces)
    for i, basis in enumerate(bases):
        lam = basis.roots
        for s, x in enumerate((chain.x_minus[i], chain.x_plus[i])):
            ep, em = np.exp(1j * lam * x), np.exp(-1j * lam * x)
            traces[i, s, 0], traces[i, s, 1] = ep, em
            sign = -1 if s == 0 else 1
            slopes[i, s, 0] = sign * 1j * lam * ep
            slopes[i, s, 1] = -sign * 1j * lam * em

    out = np.zeros((dim, dim), dtype=complex)
    for row_group, n in enumerate(trunc.modes):
        k_n = (omega + n * modulation.omega) / material.v0
        t_n = dtn.dtn_entries(k_n, alpha, chain)
        g = np.zeros((2 * n_res, 2 * n_res * size), dtype=complex)
        v = np.zeros_like(g)
        p = trunc.K - n
        for i, basis in enumerate(bases):
            r, _ = modulation.reciprocal_fourier_coefficients(i)
            weight = np.zeros(size, dtype=complex)
            for m in range(-cutoff, cutoff + 1):
                if 0 <= p + m < size:
                    weight += r[m + cutoff] * basis.vectors[p + m, :]
            vn = basis.vectors[p, :]
            for col_group in range(size):
                c0 = 2 * n_res * col_group + 2 * i
                g[2 * i:2 * i + 2, c0:c0 + 2] = weight[col_group] * slopes[i, :, :, col_group]
                v[2 * i:2 * i + 2, c0:c0 + 2] = vn[col_group] * traces[i, :, :, col_group]
        out[2 * n_res * row_group:2 * n_res * (row_group + 1)] = g - delta * (t_n @ v)
    return AssembledSystem(out, complex(omega), float(alpha))


OFF_DOMAIN = (SingularGap, ResonantModeCollision)


class ExactProblem:
    """Bundles the inputs of the truncated exact problem at one quasi-momentum."""

    def __init__(self, alpha, chain, material, modulation, trunc=TruncationParams()):
        self.alpha = float(alpha)
        self.chain = chain
        self.material = material
        self.modulation = modulation
        self.trunc = _as_trunc(trunc)

    def matrix(self, omega) -> np.ndarray:
        return assemble_a_star(omega, self.alpha, self.material.delta, self.chain,
                               self.material, self.modulation, self.trunc).matrix

    def smallest_eigenvalue(self, omega) -> complex:
        """Eigenvalue of A*(omega) with the smallest modulus (the Muller target)."""
        lam = np.linalg.eigvals(self.matrix(omega))
        return complex(lam[np.argmin(np.abs(lam))])

    def objective(self, omega) -> float:
        return abs(self.smallest_eigenvalue(omega))

    def smallest_singular_value(self, omega) -> float:
        return float(np.linalg.svd(self.matrix(omega), compute_uv=False)[-1])


def objective_f(omega, alpha, chain, material, modulation, trunc=TruncationParams()) -> float:
    """min |lambda| over the spectrum of A*(omega, delta)."""
    return ExactProblem(alpha, chain, material, modulation, trunc).objective(omega)


def static_seed_eigenvalues(alpha, chain, material) -> np.ndarray:
    """Eigenvalues of diag(1/ell_i) C^alpha (generalized ones divided by v_r^2)."""
    return generalized_eigenvalues(alpha, chain, material) / material.vr**2


def default_seeds(alpha, chain, material, config: MullerConfig | None = None):
    lam = static_seed_eigenvalues(alpha, chain, material)
    seeds = []
    for value in lam:
        for sign in (1, -1):
            seeds.append(seeds_from_static(value, material.delta, material.vr, sign, config))
    return seeds


@dataclass(frozen=True, eq=False)
class ExactRoots:
    roots: np.ndarray
    residuals: np.ndarray
    iterations: np.ndarray
    failures: list = field(default_factory=list)
    big_omega: float = 1.0
    alpha: float = 0.0

    def spectrum(self) -> QuasifrequencySpectrum:
        return QuasifrequencySpectrum(self.alpha, self.roots, "exact", self.big_omega)


def _is_collision(omega, big, K):
    n = np.arange(-K, K + 1)
    return np.min(np.abs(omega + n * big)) < 1e-9


def exact_quasifrequencies(alpha, chain, material, modulation, trunc=TruncationParams(),
                           seeds=None, config: MullerConfig | None = None,
                           zero_tolerance: float = 1e-14) -> ExactRoots:
    """Quasifrequencies of the truncated exact problem from Muller's method.

    ``seeds`` is a list of seed triples; by default two triples (+ and -)
    per static capacitance eigenvalue. A seed triple built on a zero static
    eigenvalue (alpha = 0) returns omega = 0 directly: the constant field is
    an exact solution there, while the interior Ansatz degenerates at that
    point. Converged roots sitting on omega + n Omega = 0 are the same Ansatz
    degeneracy and are discarded. Roots are deduplicated within
    ``DEDUP_RADIUS`` after folding.
    """
    config = config or MullerConfig()
    trunc = _as_trunc(trunc)
    problem = ExactProblem(alpha, chain, material, modulation, trunc)
    big = modulation.omega
    if seeds is None:
        seeds = default_seeds(alpha, chain, material, config)
    lam_ref = max(static_seed_eigenvalues(a, chain, material).max()
                  for a in (alpha, 0.0, np.pi / chain.period))
    cutoff = 10 * material.vr * np.sqrt(material.delta * lam_ref)

    found, residuals, iters, failures = [], [], [], []
    for triple in seeds:
        triple = tuple(complex(s) for s in triple)
        if max(abs(s) for s in triple) <= max(zero_tolerance, 10 * config.perturbation) and \
                static_seed_eigenvalues(alpha, chain, material).min() <= zero_tolerance:
            found.append(0j)
            residuals.append(0.0)
            iters.append(0)
            continue
        try:
            res = find_root(problem.smallest_eigenvalue, triple, config, OFF_DOMAIN)
        except (NoConvergence, ValueError) as exc:
            log.warning("alpha=%.6g seed %s: %s", alpha, triple[0], exc)
            failures.append((triple[0], str(exc)))
            continue
        if _is_collision(res.root, big, trunc.K):
            failures.append((triple[0], "converged onto omega + n*Omega = 0"))
            continue
        if abs(res.root) > cutoff:
            failures.append((triple[0], f"root {res.root} outside the subwavelength range"))
            continue
        found.append(res.root)
        residuals.append(abs(res.value))
        iters.append(res.iterations)

    keep = []
    for idx, w in enumerate(found):
        if all(wrapped_distance(w, found[j], big) >= DEDUP_RADIUS for j in keep):
            keep.append(idx)
    roots = np.array([found[j] for j in keep], dtype=complex)
    order = np.lexsort((fold(roots, big).imag, fold(roots, big).real)) if roots.size else []
    return ExactRoots(
        roots=roots[order],
        residuals=np.array([residuals[j] for j in keep])[order],
        iterations=np.array([iters[j] for j in keep], dtype=int)[order],
        failures=failures,
        big_omega=big,
        alpha=float(alpha),
    )
