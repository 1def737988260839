"""Static quasi-periodic capacitance matrix and the band functions it predicts."""

from __future__ import annotations

import numpy as np

from .model import MaterialConstants, ResonatorChain


def capacitance_matrix(alpha: float, chain: ResonatorChain) -> np.ndarray:
    """N x N Hermitian capacitance matrix C^alpha.

    Entries are accumulated, so the corner terms fold onto the diagonal for
    N = 1 and onto the first off-diagonal for N = 2.
    """
    n = chain.n
    inv = 1.0 / chain.gaps
    phase = np.exp(1j * alpha * chain.period)
    c = np.zeros((n, n), dtype=complex)
    for i in range(n):
        c[i, i] += inv[i - 1] + inv[i]
    for i in range(n - 1):
        c[i, i + 1] -= inv[i]
        c[i + 1, i] -= inv[i]
    c[0, n - 1] -= inv[-1] / phase
    c[n - 1, 0] -= inv[-1] * phase
    return c


def wave_speeds(chain: ResonatorChain, material: MaterialConstants) -> np.ndarray:
    # one resonator material, so every v_i equals v_r
    return np.full(chain.n, material.vr)


def generalized_capacitance(alpha: float, chain: ResonatorChain,
                            material: MaterialConstants) -> np.ndarray:
    """V^2 L^{-1} C^alpha with V = diag(v_i), L = diag(ell_i)."""
    v = wave_speeds(chain, material)
    return (v**2 / chain.lengths)[:, None] * capacitance_matrix(alpha, chain)


def generalized_eigenvalues(alpha: float, chain: ResonatorChain,
                            material: MaterialConstants) -> np.ndarray:
    """Eigenvalues of the generalized capacitance matrix, ascending.

    Computed from the Hermitian matrix D C D with D = diag(v_i / sqrt(ell_i)),
    which is similar to V^2 L^{-1} C. Tiny negative round-off is clipped.
    """
    d = wave_speeds(chain, material) / np.sqrt(chain.lengths)
    herm = d[:, None] * capacitance_matrix(alpha, chain) * d[None, :]
    lam = np.linalg.eigvalsh(herm)
    return np.clip(lam, 0.0, None)


def static_bands(alpha: float, delta: float, chain: ResonatorChain,
                 material: MaterialConstants, both_signs: bool = False) -> np.ndarray:
    """Leading-order static band functions sqrt(delta * lambda_i), ascending.

    With ``both_signs`` the negatives are included, giving 2N values.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    omega = np.sqrt(delta * generalized_eigenvalues(alpha, chain, material))
    if both_signs:
        return np.sort(np.concatenate((-omega, omega)))
    return omega
