"""Folded quasifrequency spectra shared by every solver route."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

METHODS = ("exact", "floquet", "static", "perturbative")


def fold(omega, big_omega: float):
    """Fold real parts into [-Omega/2, Omega/2); imaginary parts are kept.

    Works on scalars and arrays, real or complex.
    """
    omega = np.asarray(omega)
    re = np.real(omega)
    half = 0.5 * big_omega
    folded = np.mod(re + half, big_omega) - half
    # mod can round up onto the open end of the window
    folded = np.where(folded >= half, folded - big_omega, folded)
    if np.iscomplexobj(omega):
        out = folded + 1j * np.imag(omega)
    else:
        out = folded
    return out[()] if out.ndim == 0 else out


def wrapped_distance(a, b, big_omega: float):
    """|a - b| with the real part of the difference taken modulo Omega."""
    d = np.asarray(a) - np.asarray(b)
    re = fold(np.real(d), big_omega)
    return np.hypot(re, np.imag(d))


@dataclass(frozen=True, eq=False)
class QuasifrequencySpectrum:
    """Quasifrequencies at one quasi-momentum, folded and sorted by (Re, Im)."""

    alpha: float
    omega: np.ndarray
    method: str
    big_omega: float

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        vals = fold(np.asarray(self.omega, dtype=complex).ravel(), self.big_omega)
        vals = np.atleast_1d(vals)
        order = np.lexsort((vals.imag, vals.real))
        object.__setattr__(self, "omega", vals[order])

    def __len__(self):
        return self.omega.size

    @property
    def re(self):
        return self.omega.real

    @property
    def im(self):
        return self.omega.imag
