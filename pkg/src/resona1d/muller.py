"""Muller's three-point root finder in the complex plane."""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateParabola, NoConvergence


@dataclass(frozen=True)
class MullerConfig:
    tolerance: float = 1e-12
    max_iterations: int = 100
    perturbation: float = 1e-5

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 3:
            raise ValueError("max_iterations must be at least 3")


@dataclass(frozen=True)
class MullerResult:
    root: complex
    value: complex
    iterations: int


def _muller_step(x0, x1, x2, f0, f1, f2):
    h1, h2 = x1 - x0, x2 - x1
    d1, d2 = (f1 - f0) / h1, (f2 - f1) / h2
    a = (d2 - d1) / (h2 + h1)
    b = a * h2 + d2
    disc = cmath.sqrt(b * b - 4 * a * f2)
    den = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
    if den == 0:
        raise DegenerateParabola("quadratic model is flat through the last three iterates")
    return x2 - 2 * f2 / den


def _iterate(objective, seeds, config, off_domain, rng):
    xs, fs = [], []
    for s in seeds:
        x, fx = _safe_eval(objective, complex(s), off_domain, rng, config)
        xs.append(x)
        fs.append(complex(fx))
    best = min(range(3), key=lambda k: abs(fs[k]))
    if abs(fs[best]) <= config.tolerance:
        return MullerResult(xs[best], fs[best], 0)
    for it in range(1, config.max_iterations + 1):
        x3 = _muller_step(*xs, *fs)
        x3, f3 = _safe_eval(objective, x3, off_domain, rng, config)
        if abs(f3) <= config.tolerance:
            return MullerResult(x3, f3, it)
        if x3 == xs[2]:
            break
        xs = [xs[1], xs[2], x3]
        fs = [fs[1], fs[2], f3]
    raise NoConvergence(
        f"no root within {config.max_iterations} iterations (|f| = {abs(fs[-1]):.3e})",
        last=xs[-1], iterations=config.max_iterations,
    )


def _safe_eval(objective, x, off_domain, rng, config, attempts=8):
    """Evaluate, nudging ``x`` off excluded points that raise ``off_domain``."""
    for _ in range(attempts):
        try:
            return x, objective(x)
        except off_domain:
            scale = config.perturbation * max(abs(x), 1.0)
            x = x + scale * complex(rng.standard_normal(), rng.standard_normal())
    raise NoConvergence(f"iterate stuck on an excluded point near {x}", last=x)


def find_root(objective: Callable[[complex], complex], seeds, config: MullerConfig | None = None,
              off_domain: tuple = ()) -> MullerResult:
    """Find a zero of ``objective`` starting from three distinct seeds.

    Each step fits a quadratic through the last three iterates and moves to
    its root nearest the newest iterate. Exceptions listed in ``off_domain``
    mark excluded points; such iterates are re-perturbed and retried. A flat
    quadratic triggers one restart from perturbed seeds.
    """
    config = config or MullerConfig()
    seeds = [complex(s) for s in seeds]
    if len(seeds) != 3:
        raise ValueError("Muller's method needs exactly three seeds")
    if len({seeds[0], seeds[1], seeds[2]}) != 3:
        raise ValueError("seeds must be pairwise distinct")
    rng = np.random.default_rng(0)
    try:
        return _iterate(objective, seeds, config, off_domain, rng)
    except DegenerateParabola:
        scale = config.perturbation * max(max(abs(s) for s in seeds), 1e-3)
        bumped = [s + scale * complex(rng.standard_normal(), rng.standard_normal()) for s in seeds]
        return _iterate(objective, bumped, config, off_domain, rng)


def seeds_from_static(lambda_alpha: float, delta: float, vr: float, sign: int = 1,
                      config: MullerConfig | None = None):
    """Three seeds around sign * v_r * sqrt(lambda * delta).

    ``lambda_alpha`` is an eigenvalue of diag(1/ell_i) C^alpha. Companions
    sit at base * (1 +- perturbation); a zero base uses absolute offsets
    +-p and 2p*i instead.
    """
    if lambda_alpha < 0:
        raise ValueError("lambda_alpha must be nonnegative")
    p = (config or MullerConfig()).perturbation
    base = sign * vr * np.sqrt(lambda_alpha * delta)
    if base == 0:
        return (complex(p), complex(-p), complex(0, 2 * p))
    return (complex(base), complex(base * (1 + p)), complex(base * (1 - p)))
