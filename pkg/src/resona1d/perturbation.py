"""First-order asymptotics of the quasifrequencies in the modulation amplitude.

With a common amplitude eps for every rho_i and kappa_i, the capacitance
operator expands as M(t) = M0 + eps M1(t) + O(eps^2) where M1 only carries
the harmonics exp(+-i Omega t). Writing the first-order system
y' = A(t) y with A0 diagonalized, folded eigenvalues of A0 that coincide
split at first order according to a small block of Fourier coefficients of
A1 (the F1 block).

Exponents f of the first-order system relate to quasifrequencies through
f = i omega.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .capacitance import capacitance_matrix, static_bands
from .errors import EigenFailure, MixedAmplitudes, NotDegenerate
from .floquet import floquet_spectrum
from .model import MaterialConstants, Modulation, ResonatorChain
from .spectrum import wrapped_distance

DEGENERACY_TOL = 1e-8


@dataclass(frozen=True)
class FoldedEigenvalue:
    """omega_A0 = omega_0 + m Omega with omega_0 in [-Omega/2, Omega/2)."""

    omega_A0: float
    omega_0: float
    m: int


def folding_number(omega_A0: float, big_omega: float) -> FoldedEigenvalue:
    """Split a frequency into its folded part and folding number."""
    if not big_omega > 0:
        raise ValueError("Omega must be positive")
    omega_A0 = float(omega_A0)
    m = int(np.floor((omega_A0 + 0.5 * big_omega) / big_omega))
    omega_0 = omega_A0 - m * big_omega
    # floor can land one window off when omega_A0 sits on a window edge
    if omega_0 >= 0.5 * big_omega:
        m += 1
        omega_0 -= big_omega
    elif omega_0 < -0.5 * big_omega:
        m -= 1
        omega_0 += big_omega
    return FoldedEigenvalue(omega_A0, omega_0, m)


def common_amplitude(modulation: Modulation) -> float:
    eps = np.concatenate((modulation.eps_rho, modulation.eps_kappa))
    if np.ptp(eps) > 0:
        raise MixedAmplitudes("first-order expansion needs eps_rho_i = eps_kappa_i = eps for all i")
    return float(eps[0])


def static_operator(alpha, chain: ResonatorChain, material: MaterialConstants) -> np.ndarray:
    """M0 = delta v_r^2 diag(1/ell) C^alpha."""
    scale = material.delta * material.vr**2
    return scale * capacitance_matrix(alpha, chain) / chain.lengths[:, None]


@dataclass(frozen=True, eq=False)
class PerturbationExpansion:
    """Static operator, first-order harmonics and the diagonalized first-order system.

    Attributes
    ----------
    m0 : ndarray
        Static operator M0.
    m1_plus, m1_minus : ndarray
        Coefficients of exp(+i Omega t) and exp(-i Omega t) in M1(t).
    basis : ndarray
        Columns diagonalize A0 = [[0, I], [-M0, 0]]; the first N columns
        belong to +s_j, the last N to -s_j, with s_j^2 the eigenvalues of M0.
    omega_a0 : ndarray
        Frequencies s with A0 eigenvalue i s, in the basis order.
    folded : list of FoldedEigenvalue
    a1 : dict
        Harmonics {-1, 0, +1} of A1(t) in the diagonal basis.
    """

    alpha: float
    big_omega: float
    epsilon: float
    m0: np.ndarray
    m1_plus: np.ndarray
    m1_minus: np.ndarray
    basis: np.ndarray
    omega_a0: np.ndarray
    folded: list
    a1: dict

    @property
    def n(self) -> int:
        return self.m0.shape[0]

    @property
    def folding_numbers(self) -> np.ndarray:
        return np.array([fe.m for fe in self.folded])

    @property
    def folded_frequencies(self) -> np.ndarray:
        return np.array([fe.omega_0 for fe in self.folded])

    @property
    def a0(self) -> np.ndarray:
        return np.diag(1j * self.omega_a0)

    @property
    def f0(self) -> np.ndarray:
        """F0 = A0 - i Omega diag(m); diagonal with entries i omega_0."""
        return self.a0 - 1j * self.big_omega * np.diag(self.folding_numbers)

    def a1_harmonic(self, m: int) -> np.ndarray:
        return self.a1.get(m, np.zeros((2 * self.n, 2 * self.n), dtype=complex))

    def m1(self, t):
        """M1(t) per unit amplitude."""
        ph = np.exp(1j * self.big_omega * np.asarray(t, dtype=float))[..., None, None]
        return self.m1_plus * ph + self.m1_minus / ph

    def aligned_folding_numbers(self, indices) -> np.ndarray:
        """Folding numbers of a cluster measured from one common folded point.

        A cluster sitting on the window edge -Omega/2 may have members folded
        to either end of the window; aligning on the first member keeps the
        differences m_l - m_k consistent.
        """
        ref = self.folded_frequencies[indices[0]]
        return np.rint((self.omega_a0[list(indices)] - ref) / self.big_omega).astype(int)

    def degenerate_pairs(self, tol: float = DEGENERACY_TOL):
        """Index pairs (l, k), l < k, of folded frequencies closer than tol * Omega."""
        w = self.folded_frequencies
        out = []
        for l in range(w.size):
            for k in range(l + 1, w.size):
                if wrapped_distance(w[l], w[k], self.big_omega) < tol * self.big_omega:
                    out.append((l, k))
        return out


def first_order_harmonics(alpha, chain, material, modulation):
    """(M0, M1^(+1), M1^(-1)) per unit amplitude; needs no diagonalization."""
    big = modulation.omega
    L = static_operator(alpha, chain, material)
    n = chain.n
    out = {}
    for sign in (1, -1):
        er = 0.5 * np.exp(sign * 1j * modulation.phi_rho)
        ek = 0.5 * np.exp(sign * 1j * modulation.phi_kappa)
        coef = L * (er[:, None] - er[None, :] - 0.5 * (ek[:, None] + ek[None, :]))
        coef[np.diag_indices(n)] = (0.5 * big**2 - np.diag(L)) * ek
        out[sign] = coef
    return L, out[1], out[-1]


def _diagonalize(m0):
    lam, q = np.linalg.eig(m0)
    if np.any(np.abs(lam) < 1e-14 * max(1.0, np.abs(lam).max())):
        raise EigenFailure("M0 is singular, so A0 has a Jordan block and cannot be diagonalized")
    s = np.sqrt(lam.astype(complex))
    if np.max(np.abs(s.imag)) > 1e-10 * np.abs(s).max():
        raise EigenFailure("M0 has eigenvalues off the positive axis")
    s = s.real
    order = np.argsort(s)
    s, q = s[order], q[:, order]
    basis = np.block([[q, q], [1j * q * s, -1j * q * s]])
    if np.linalg.cond(basis) > 1e12:
        raise EigenFailure("A0 eigenbasis is numerically singular")
    return np.concatenate((s, -s)), basis


def m_first_order(alpha, chain: ResonatorChain, material: MaterialConstants,
                  modulation: Modulation) -> PerturbationExpansion:
    """Expand M^alpha(t) to first order in the common amplitude.

    Off-diagonal entries carry L_lj (cos(theta_rho_l) - cos(theta_rho_j)
    - (cos(theta_kappa_l) + cos(theta_kappa_j)) / 2) and the diagonal
    carries (Omega^2 / 2 - L_ll) cos(theta_kappa_l), with
    theta = Omega t + phi and L = M0.

    Raises
    ------
    MixedAmplitudes
        If the amplitudes are not all equal.
    EigenFailure
        If A0 is not diagonalizable, e.g. at alpha = 0 where M0 is singular.
    """
    eps = common_amplitude(modulation)
    big = modulation.omega
    m0, m1p, m1m = first_order_harmonics(alpha, chain, material, modulation)
    omega_a0, basis = _diagonalize(m0)
    inv = np.linalg.inv(basis)
    n = chain.n
    a1 = {}
    for p, coef in ((1, m1p), (-1, m1m)):
        block = np.zeros((2 * n, 2 * n), dtype=complex)
        block[n:, :n] = -coef
        a1[p] = inv @ block @ basis
    a1[0] = np.zeros((2 * n, 2 * n), dtype=complex)
    folded = [folding_number(w, big) for w in omega_a0]
    return PerturbationExpansion(float(alpha), big, eps, m0, m1p, m1m, basis, omega_a0, folded, a1)


@dataclass(frozen=True, eq=False)
class F1Block:
    indices: tuple
    block: np.ndarray
    eigenvalues: np.ndarray
    omega_0: float

    @property
    def quasifrequency_shifts(self) -> np.ndarray:
        """First-order quasifrequency corrections -i f per unit amplitude."""
        return -1j * self.eigenvalues


def f1_block(expansion: PerturbationExpansion, indices, tol: float = DEGENERACY_TOL) -> F1Block:
    """Upper-left block of F1 for a degenerate cluster of folded eigenvalues.

    Entries are (F1)_lk = (A1^(m_l - m_k))_lk over the cluster.
    """
    indices = tuple(int(i) for i in indices)
    w = expansion.folded_frequencies[list(indices)]
    spread = max(wrapped_distance(a, b, expansion.big_omega) for a in w for b in w)
    if len(indices) < 2 or spread >= tol * expansion.big_omega:
        raise NotDegenerate(f"cluster {indices} spans {spread:.3e}, above {tol:g} * Omega")
    m = dict(zip(indices, expansion.aligned_folding_numbers(indices)))
    r = len(indices)
    block = np.empty((r, r), dtype=complex)
    for a, l in enumerate(indices):
        for b, k in enumerate(indices):
            block[a, b] = expansion.a1_harmonic(m[l] - m[k])[l, k]
    return F1Block(indices, block, np.linalg.eigvals(block), float(w[0]))


def offblock_entry(expansion: PerturbationExpansion, j: int, l: int) -> complex:
    """(F1)_jl for a non-degenerate pair, following the series form.

    Used only off the degenerate block; such entries do not change the
    block eigenvalues.
    """
    f0, a0 = np.diag(expansion.f0), np.diag(expansion.a0)
    big = expansion.big_omega
    total = 0j
    for p in (-1, 0, 1):
        total += expansion.a1_harmonic(p)[j, l] / (1j * big * p + a0[l] - a0[j])
    return complex((f0[l] - f0[j]) * total)


def f1_matrix(expansion: PerturbationExpansion, tol: float = DEGENERACY_TOL) -> np.ndarray:
    """Full first-order matrix F1, degenerate entries by folding numbers, the rest by series."""
    size = 2 * expansion.n
    w = expansion.folded_frequencies
    out = np.zeros((size, size), dtype=complex)
    for j in range(size):
        out[j, j] = expansion.a1_harmonic(0)[j, j]
        for l in range(size):
            if l == j:
                continue
            if wrapped_distance(w[j], w[l], expansion.big_omega) < tol * expansion.big_omega:
                mj, ml = expansion.aligned_folding_numbers((j, l))
                out[j, l] = expansion.a1_harmonic(mj - ml)[j, l]
            else:
                out[j, l] = offblock_entry(expansion, j, l)
    return out


def gap_size_estimate(expansion: PerturbationExpansion, indices, epsilon: float | None = None) -> float:
    """2 eps |sqrt((F1)_12 (F1)_21)| at a doubly degenerate point."""
    if len(indices) != 2:
        raise ValueError("the gap estimate needs a pair of indices")
    blk = f1_block(expansion, indices)
    eps = expansion.epsilon if epsilon is None else epsilon
    return float(2 * eps * abs(np.sqrt(blk.block[0, 1] * blk.block[1, 0])))


def measured_splitting(alpha, chain, material, modulation, omega_0: float, **kwargs) -> float:
    """Distance between the two Floquet quasifrequencies nearest omega_0."""
    spec = floquet_spectrum(alpha, chain, material, modulation, **kwargs)
    d = wrapped_distance(spec.omega, omega_0, modulation.omega)
    a, b = np.argsort(d)[:2]
    return float(wrapped_distance(spec.omega[a], spec.omega[b], modulation.omega))


def static_crossing_alpha(chain, material, band: int, target: float, bracket) -> float:
    """alpha in ``bracket`` where static band ``band`` (ascending) equals ``target``."""
    def g(a):
        return static_bands(a, material.delta, chain, material)[band] - target

    return float(brentq(g, *bracket, xtol=1e-15, rtol=4 * np.finfo(float).eps))


__all__ = [
    "FoldedEigenvalue", "folding_number", "PerturbationExpansion", "m_first_order",
    "first_order_harmonics", "F1Block", "f1_block", "offblock_entry", "f1_matrix", "gap_size_estimate",
    "measured_splitting", "static_operator", "common_amplitude", "static_crossing_alpha",
]
