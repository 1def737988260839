"""Capacitance approximation of the modulated problem and its period map.

The leading-order dynamics are Psi'' + M(t) Psi = 0 with

    M(t) = delta v_r^2 W1(t) C^alpha W2(t) + W3(t),

W1 = diag(sqrt(kappa_i)/ell_i), W2 = diag(sqrt(kappa_i)) and
W3 = diag(sqrt(kappa_i)/2 * d/dt(kappa_i' / kappa_i^{3/2})). Quasifrequencies
follow from the eigenvalues mu of the monodromy matrix as -i log(mu) / T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .capacitance import capacitance_matrix
from .errors import IntegrationFailure
from .model import MaterialConstants, Modulation, ResonatorChain
from .spectrum import QuasifrequencySpectrum

RTOL = 1e-10
ATOL = 1e-12


def w3_diagonal(modulation: Modulation, t):
    """Diagonal of W3, from the analytic kappa derivatives."""
    k, d1, d2 = modulation.kappa_derivatives(t)
    return d2 / (2 * k) - 0.75 * d1**2 / k**2


class ModulatedOperator:
    """Evaluates t -> M^alpha(t) for one quasi-momentum."""

    def __init__(self, alpha, chain: ResonatorChain, material: MaterialConstants,
                 modulation: Modulation):
        if modulation.n != chain.n:
            raise ValueError("modulation and chain disagree on N")
        self.alpha = float(alpha)
        self.chain = chain
        self.material = material
        self.modulation = modulation
        self.scale = material.delta * material.vr**2
        self.cap = capacitance_matrix(alpha, chain)

    @property
    def is_constant(self) -> bool:
        return not np.any(self.modulation.eps_kappa)

    def __call__(self, t) -> np.ndarray:
        kappa = self.modulation.kappa(t)
        s = np.sqrt(kappa)
        m = self.scale * (s / self.chain.lengths)[:, None] * self.cap * s[None, :]
        m[np.diag_indices_from(m)] += w3_diagonal(self.modulation, t)
        return m

    def system_matrix(self, t) -> np.ndarray:
        """A(t) = [[0, I], [-M(t), 0]]."""
        n = self.chain.n
        a = np.zeros((2 * n, 2 * n), dtype=complex)
        a[:n, n:] = np.eye(n)
        a[n:, :n] = -self(t)
        return a


def m_alpha_at(t, alpha, chain, material, modulation) -> np.ndarray:
    return ModulatedOperator(alpha, chain, material, modulation)(t)


@dataclass(frozen=True, eq=False)
class Monodromy:
    matrix: np.ndarray
    period: float
    alpha: float

    @property
    def det_error(self) -> float:
        return float(abs(np.linalg.det(self.matrix) - 1.0))


def _rk4_period(op: ModulatedOperator, period, steps):
    n2 = 2 * op.chain.n
    x = np.eye(n2, dtype=complex)
    h = period / steps
    for s in range(steps):
        t = s * h
        a0 = op.system_matrix(t)
        ah = op.system_matrix(t + h / 2)
        a1 = op.system_matrix(t + h)
        k1 = a0 @ x
        k2 = ah @ (x + h / 2 * k1)
        k3 = ah @ (x + h / 2 * k2)
        k4 = a1 @ (x + h * k3)
        x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return x


def monodromy(alpha, chain, material, modulation, method: str = "DOP853",
              rtol: float = RTOL, atol: float = ATOL, rk4_steps: int = 10_000) -> Monodromy:
    """Fundamental matrix of y' = A(t) y after one modulation period.

    A time-independent operator (no kappa modulation) is exponentiated
    directly. Otherwise ``method`` is a ``solve_ivp`` integrator name, or
    ``"rk4"`` for a fixed-step classical Runge-Kutta sweep.
    """
    op = ModulatedOperator(alpha, chain, material, modulation)
    period = modulation.period
    n = chain.n
    if op.is_constant:
        return Monodromy(expm(op.system_matrix(0.0) * period), period, op.alpha)
    if method == "rk4":
        return Monodromy(_rk4_period(op, period, rk4_steps), period, op.alpha)

    def rhs(t, y):
        x = y.reshape(2 * n, 2 * n)
        out = np.empty_like(x)
        out[:n] = x[n:]
        out[n:] = -op(t) @ x[:n]
        return out.ravel()

    y0 = np.eye(2 * n, dtype=complex).ravel()
    sol = solve_ivp(rhs, (0.0, period), y0, method=method, rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationFailure(f"alpha={alpha}: {sol.message}")
    return Monodromy(sol.y[:, -1].reshape(2 * n, 2 * n), period, op.alpha)


def merge_radius(mono: Monodromy) -> float:
    """Multiplier separation below which a pair is treated as one defective eigenvalue.

    A Jordan block perturbed by eta splits by ~sqrt(eta); the Liouville
    defect |det X_T - 1| serves as the estimate of eta.
    """
    return 10.0 * np.sqrt(max(mono.det_error, 1e-15))


def multipliers(mono: Monodromy, radius: float | None = None) -> np.ndarray:
    """Eigenvalues of X_T with near-coincident pairs replaced by their mean.

    At alpha = 0 the period map always carries a defective double multiplier
    1 (a conserved momentum), and eigensolvers split such blocks by the
    square root of the integration error. The pair mean is accurate to the
    integration error itself.
    """
    mu = np.linalg.eigvals(mono.matrix).astype(complex)
    radius = merge_radius(mono) if radius is None else radius
    if radius <= 0:
        return mu
    free = list(range(mu.size))
    while len(free) > 1:
        dist, a, b = min((abs(mu[a] - mu[b]), a, b) for ia, a in enumerate(free) for b in free[ia + 1:])
        if dist >= radius:
            break
        mu[a] = mu[b] = 0.5 * (mu[a] + mu[b])
        free.remove(a)
        free.remove(b)
    return mu


def floquet_exponents(mono: Monodromy, radius: float | None = None) -> np.ndarray:
    return np.log(multipliers(mono, radius)) / mono.period


def quasifrequencies_from_monodromy(mono: Monodromy, big_omega: float,
                                    radius: float | None = None) -> QuasifrequencySpectrum:
    """Folded quasifrequencies -i log(mu) / T for every multiplier mu."""
    omega = -1j * floquet_exponents(mono, radius)
    return QuasifrequencySpectrum(mono.alpha, omega, "floquet", big_omega)


def floquet_spectrum(alpha, chain, material, modulation, radius=None, **kwargs) -> QuasifrequencySpectrum:
    mono = monodromy(alpha, chain, material, modulation, **kwargs)
    return quasifrequencies_from_monodromy(mono, modulation.omega, radius)
