"""Geometry, material constants and time-modulation laws.

Resonators are indexed from 0 in code. A chain is described by the resonator
lengths and the gaps that follow each resonator; the last gap wraps around to
the first resonator of the next period cell.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class ResonatorChain:
    """N resonators in one period cell, with x_1^- = 0.

    Parameters
    ----------
    lengths : sequence of float
        Resonator lengths ell_i.
    gaps : sequence of float
        Gap lengths ell_{i(i+1)}; ``gaps[-1]`` is the wrap-around gap between
        the last resonator and the first one of the next cell.
    """

    lengths: np.ndarray
    gaps: np.ndarray

    def __post_init__(self):
        lengths = np.asarray(self.lengths, dtype=float).ravel()
        gaps = np.asarray(self.gaps, dtype=float).ravel()
        if lengths.size == 0:
            raise ValueError("a chain needs at least one resonator")
        if gaps.size != lengths.size:
            raise ValueError(f"expected {lengths.size} gaps, got {gaps.size}")
        if np.any(lengths <= 0) or np.any(gaps <= 0):
            raise ValueError("resonator lengths and gaps must be positive")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "gaps", gaps)

    @property
    def n(self) -> int:
        return self.lengths.size

    @property
    def period(self) -> float:
        return float(self.lengths.sum() + self.gaps.sum())

    @property
    def boundary_points(self) -> np.ndarray:
        """Array of shape (N, 2) holding (x_i^-, x_i^+)."""
        steps = np.empty(2 * self.n)
        steps[0::2] = self.lengths
        steps[1::2] = self.gaps
        edges = np.concatenate(([0.0], np.cumsum(steps)[:-1]))
        return edges.reshape(self.n, 2)

    @property
    def x_minus(self) -> np.ndarray:
        return self.boundary_points[:, 0]

    @property
    def x_plus(self) -> np.ndarray:
        return self.boundary_points[:, 1]


@dataclass(frozen=True)
class MaterialConstants:
    """Background (rho0, kappa0) and resonator (rho_r, kappa_r) constants."""

    rho0: float
    kappa0: float
    rho_r: float
    kappa_r: float

    def __post_init__(self):
        for name in ("rho0", "kappa0", "rho_r", "kappa_r"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_speeds(cls, delta: float, v0: float = 1.0, vr: float = 1.0) -> "MaterialConstants":
        """Build constants with rho0 = 1 from the contrast and two wave speeds."""
        return cls(rho0=1.0, kappa0=v0**2, rho_r=delta, kappa_r=delta * vr**2)

    @property
    def delta(self) -> float:
        return self.rho_r / self.rho0

    @property
    def v0(self) -> float:
        return float(np.sqrt(self.kappa0 / self.rho0))

    @property
    def vr(self) -> float:
        return float(np.sqrt(self.kappa_r / self.rho_r))


def _per_resonator(values, n, name):
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 1 and n > 1:
        arr = np.full(n, arr[0])
    if arr.size != n:
        raise ValueError(f"{name} must have {n} entries, got {arr.size}")
    return arr


@dataclass(frozen=True, eq=False)
class Modulation:
    """Cosine modulation of 1/rho_i and 1/kappa_i.

    rho_i(t) = 1 / (1 + eps_rho_i cos(Omega t + phi_rho_i)) and likewise for
    kappa_i. Setting every amplitude to zero gives the static problem; Omega
    still fixes the folding window [-Omega/2, Omega/2).
    """

    omega: float
    eps_rho: np.ndarray
    eps_kappa: np.ndarray
    phi_rho: np.ndarray
    phi_kappa: np.ndarray
    n: int = field(default=0)

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("modulation frequency Omega must be positive")
        n = self.n or np.asarray(self.eps_kappa).size
        for name in ("eps_rho", "eps_kappa", "phi_rho", "phi_kappa"):
            object.__setattr__(self, name, _per_resonator(getattr(self, name), n, name))
        object.__setattr__(self, "n", n)
        for name in ("eps_rho", "eps_kappa"):
            eps = getattr(self, name)
            if np.any(eps < 0) or np.any(eps >= 1):
                raise ValueError(f"{name} must lie in [0, 1)")

    @classmethod
    def static(cls, n: int, omega: float) -> "Modulation":
        zeros = np.zeros(n)
        return cls(omega, zeros, zeros, zeros, zeros, n=n)

    @classmethod
    def uniform(cls, n, omega, eps_rho=0.0, eps_kappa=0.0, phi_rho=0.0, phi_kappa=0.0):
        return cls(omega, eps_rho, eps_kappa, phi_rho, phi_kappa, n=n)

    @property
    def period(self) -> float:
        return 2 * np.pi / self.omega

    @property
    def fourier_cutoff(self) -> int:
        return 1

    @property
    def is_static(self) -> bool:
        return not (np.any(self.eps_rho) or np.any(self.eps_kappa))

    def with_amplitudes(self, eps_rho=None, eps_kappa=None) -> "Modulation":
        return Modulation(
            self.omega,
            self.eps_rho if eps_rho is None else eps_rho,
            self.eps_kappa if eps_kappa is None else eps_kappa,
            self.phi_rho,
            self.phi_kappa,
            n=self.n,
        )

    def _phase(self, t, phi):
        t = np.asarray(t, dtype=float)
        return self.omega * t[..., None] + phi

    def rho(self, t):
        """rho_i(t) for every resonator; shape ``t.shape + (N,)``."""
        return 1.0 / (1.0 + self.eps_rho * np.cos(self._phase(t, self.phi_rho)))

    def kappa(self, t):
        """kappa_i(t) for every resonator; shape ``t.shape + (N,)``."""
        return 1.0 / (1.0 + self.eps_kappa * np.cos(self._phase(t, self.phi_kappa)))

    def kappa_derivatives(self, t):
        """Closed-form (kappa, kappa', kappa'') for every resonator."""
        theta = self._phase(t, self.phi_kappa)
        eps, om = self.eps_kappa, self.omega
        g = 1.0 + eps * np.cos(theta)
        g1 = -eps * om * np.sin(theta)
        g2 = -eps * om**2 * np.cos(theta)
        kappa = 1.0 / g
        d1 = -g1 / g**2
        d2 = 2 * g1**2 / g**3 - g2 / g**2
        return kappa, d1, d2

    def kappa_at(self, i: int, t: float) -> float:
        return float(self.kappa(t)[i])

    def kappa_derivatives_at(self, i: int, t: float):
        k, d1, d2 = self.kappa_derivatives(t)
        return float(k[i]), float(d1[i]), float(d2[i])

    def reciprocal_fourier_coefficients(self, i: int):
        """Fourier coefficients of 1/rho_i and 1/kappa_i for m = -M..M.

        Returns two complex arrays indexed by ``m + M``.
        """
        r = np.array([
            0.5 * self.eps_rho[i] * np.exp(-1j * self.phi_rho[i]),
            1.0,
            0.5 * self.eps_rho[i] * np.exp(1j * self.phi_rho[i]),
        ])
        k = np.array([
            0.5 * self.eps_kappa[i] * np.exp(-1j * self.phi_kappa[i]),
            1.0,
            0.5 * self.eps_kappa[i] * np.exp(1j * self.phi_kappa[i]),
        ])
        return r, k
