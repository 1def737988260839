"""Exterior Helmholtz problem and its Dirichlet-to-Neumann matrix.

Boundary data are ordered (1-, 1+, 2-, 2+, ..., N-, N+). The map sends
Dirichlet data to outward one-sided derivatives, ``+v'`` at x_i^+ and
``-v'`` at x_i^-.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularGap
from .model import ResonatorChain

SIN_GUARD = 1e-10


@dataclass(frozen=True, eq=False)
class DtnMatrix:
    entries: np.ndarray
    k: complex
    alpha: float

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __matmul__(self, other):
        return self.entries @ other


def _cot_csc(k, ell, guard=SIN_GUARD):
    """Return (k cot(k ell), k / sin(k ell)), with the k -> 0 limits."""
    if k == 0:
        return 1.0 / ell, 1.0 / ell
    s = np.sin(k * ell)
    if abs(s) < guard:
        raise SingularGap(f"sin(k*ell) = {abs(s):.3e} for k={k}, ell={ell}")
    return k * np.cos(k * ell) / s, k / s


def block_a(k: complex, ell: float, guard: float = SIN_GUARD) -> np.ndarray:
    """2x2 symmetric coupling block of one gap of length ``ell``."""
    kcot, kcsc = _cot_csc(k, ell, guard)
    return np.array([[-kcot, kcsc], [kcsc, -kcot]], dtype=complex)


def exterior_coefficients(k, chain: ResonatorChain, i: int, f_plus, f_minus_next,
                          guard: float = SIN_GUARD):
    """Plane-wave coefficients (a, b) of ``a e^{ikx} + b e^{-ikx}`` in gap ``i``.

    The gap runs from x_i^+ to x_{i+1}^-; for the last gap the right end is
    x_1^- + L. The returned field interpolates ``f_plus`` and ``f_minus_next``
    at those two points.
    """
    if k == 0:
        raise ValueError("plane-wave coefficients are undefined for k = 0")
    ell = chain.gaps[i]
    s = np.sin(k * ell)
    if abs(s) < guard:
        raise SingularGap(f"sin(k*ell) = {abs(s):.3e} for k={k}, ell={ell}")
    x_left = chain.x_plus[i]
    x_right = x_left + ell
    mat = np.array([
        [np.exp(-1j * k * x_right), -np.exp(-1j * k * x_left)],
        [-np.exp(1j * k * x_right), np.exp(1j * k * x_left)],
    ])
    a, b = -mat @ np.array([f_plus, f_minus_next], dtype=complex) / (2j * s)
    return complex(a), complex(b)


def dtn_entries(k, alpha: float, chain: ResonatorChain, guard: float = SIN_GUARD) -> np.ndarray:
    n = chain.n
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    for i in range(n - 1):
        out[2 * i + 1:2 * i + 3, 2 * i + 1:2 * i + 3] = block_a(k, chain.gaps[i], guard)
    kcot, kcsc = _cot_csc(k, chain.gaps[-1], guard)
    phase = np.exp(1j * alpha * chain.period)
    out[0, 0] += -kcot
    out[-1, -1] += -kcot
    out[0, -1] += kcsc / phase
    out[-1, 0] += kcsc * phase
    return out


def dtn_matrix(k, alpha: float, chain: ResonatorChain, guard: float = SIN_GUARD) -> DtnMatrix:
    """Full 2N x 2N Dirichlet-to-Neumann matrix at wavenumber ``k``."""
    return DtnMatrix(dtn_entries(k, alpha, chain, guard), complex(k), float(alpha))
