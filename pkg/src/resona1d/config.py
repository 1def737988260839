"""Run configuration: JSON parsing, validation, presets and hashing."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .model import MaterialConstants, Modulation, ResonatorChain
from .spectrum import METHODS

DEFAULT_K = 3
DEFAULT_GRID = 101


@dataclass(frozen=True)
class Tolerances:
    muller: float = 1e-12
    k_gap: float = 1e-9
    degeneracy: float = 1e-8


@dataclass(frozen=True, eq=False)
class RunConfig:
    """Validated inputs of one run.

    ``raw`` keeps the normalized JSON form; it feeds the config hash.
    """

    chain: ResonatorChain
    material: MaterialConstants
    modulation: Modulation
    truncation_K: int = DEFAULT_K
    alpha_grid: int = DEFAULT_GRID
    method: str = "floquet"
    tolerances: Tolerances = field(default_factory=Tolerances)
    seed_perturbation: float = 1e-5
    name: str = ""
    raw: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.chain.n

    @property
    def big_omega(self) -> float:
        return self.modulation.omega

    @property
    def config_hash(self) -> str:
        return config_hash(self.raw)

    def grid(self) -> np.ndarray:
        """Symmetric alpha grid over the Brillouin zone, endpoints included."""
        half = np.pi / self.chain.period
        return alpha_grid(self.alpha_grid, half)

    def replace(self, **changes) -> "RunConfig":
        """New config with top-level JSON fields replaced, re-validated."""
        raw = json.loads(json.dumps(self.raw))
        raw.update(changes)
        return from_dict(raw)


def alpha_grid(count: int, half_width: float) -> np.ndarray:
    grid = np.linspace(-half_width, half_width, count)
    # exact mirror symmetry, so +-alpha pairs match bit for bit
    grid = 0.5 * (grid - grid[::-1])
    grid[count // 2] = 0.0
    return grid


def config_hash(raw: dict) -> str:
    text = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _require(data, key, where=""):
    name = f"{where}.{key}" if where else key
    if not isinstance(data, dict) or key not in data:
        raise ConfigError(name, "missing required field")
    return data[key]


def _float_list(value, name, n=None):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        arr = [float(value)] * (n if n is not None else 1)
    elif isinstance(value, list) and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        arr = [float(v) for v in value]
    else:
        raise ConfigError(name, "expected a number or a list of numbers")
    if n is not None and len(arr) != n:
        raise ConfigError(name, f"expected {n} entries, got {len(arr)}")
    if not all(np.isfinite(arr)):
        raise ConfigError(name, "entries must be finite")
    return arr


def _positive(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
        raise ConfigError(name, "must be a positive number")
    return float(value)


def from_dict(data: dict) -> RunConfig:
    """Validate a JSON-like mapping and fill defaults."""
    if not isinstance(data, dict):
        raise ConfigError("<root>", "expected a JSON object")
    chain_d = _require(data, "chain")
    lengths = _float_list(_require(chain_d, "lengths", "chain"), "chain.lengths")
    n = len(lengths)
    if n == 0:
        raise ConfigError("chain.lengths", "needs at least one resonator")
    gaps = _float_list(_require(chain_d, "gaps", "chain"), "chain.gaps", n)
    if min(lengths) <= 0:
        raise ConfigError("chain.lengths", "must be positive")
    if min(gaps) <= 0:
        raise ConfigError("chain.gaps", "must be positive")

    mat_d = _require(data, "material")
    delta = _positive(_require(mat_d, "delta", "material"), "material.delta")
    v0 = _positive(mat_d.get("v0", 1.0), "material.v0")
    vr = _positive(mat_d.get("vr", 1.0), "material.vr")

    mod_d = _require(data, "modulation")
    big = _positive(_require(mod_d, "Omega", "modulation"), "modulation.Omega")
    mod = {}
    for key in ("eps_rho", "eps_kappa", "phi_rho", "phi_kappa"):
        mod[key] = _float_list(mod_d.get(key, 0.0), f"modulation.{key}", n)
    for key in ("eps_rho", "eps_kappa"):
        if min(mod[key]) < 0 or max(mod[key]) >= 1:
            raise ConfigError(f"modulation.{key}", "amplitudes must lie in [0, 1)")

    K = data.get("truncation_K", DEFAULT_K)
    if isinstance(K, bool) or not isinstance(K, int) or K < 1:
        raise ConfigError("truncation_K", "must be an integer >= 1")
    grid = data.get("alpha_grid", DEFAULT_GRID)
    if isinstance(grid, bool) or not isinstance(grid, int) or grid < 3 or grid % 2 == 0:
        raise ConfigError("alpha_grid", "must be an odd integer >= 3")
    method = data.get("method", "floquet")
    if method not in METHODS:
        raise ConfigError("method", f"must be one of {', '.join(METHODS)}")
    tol_d = data.get("tolerances", {})
    if not isinstance(tol_d, dict):
        raise ConfigError("tolerances", "expected an object")
    unknown = set(tol_d) - {"muller", "k_gap", "degeneracy"}
    if unknown:
        raise ConfigError(f"tolerances.{sorted(unknown)[0]}", "unknown tolerance")
    tol = Tolerances(**{k: _positive(v, f"tolerances.{k}") for k, v in tol_d.items()})
    seed_p = _positive(data.get("seed_perturbation", 1e-5), "seed_perturbation")
    name = data.get("name", "")
    if not isinstance(name, str):
        raise ConfigError("name", "expected a string")

    raw = {
        "name": name,
        "chain": {"lengths": lengths, "gaps": gaps},
        "material": {"delta": delta, "v0": v0, "vr": vr},
        "modulation": {"Omega": big, **mod},
        "truncation_K": K,
        "alpha_grid": grid,
        "method": method,
        "tolerances": {"muller": tol.muller, "k_gap": tol.k_gap, "degeneracy": tol.degeneracy},
        "seed_perturbation": seed_p,
    }
    return RunConfig(
        chain=ResonatorChain(lengths, gaps),
        material=MaterialConstants.from_speeds(delta, v0, vr),
        modulation=Modulation(big, mod["eps_rho"], mod["eps_kappa"], mod["phi_rho"], mod["phi_kappa"], n=n),
        truncation_K=K,
        alpha_grid=grid,
        method=method,
        tolerances=tol,
        seed_perturbation=seed_p,
        name=name,
        raw=raw,
    )


def preset_names() -> list:
    files = resources.files("resona1d").joinpath("presets").iterdir()
    return sorted(p.name[:-5] for p in files if p.name.endswith(".json"))


def load_preset(name: str) -> RunConfig:
    path = resources.files("resona1d").joinpath("presets").joinpath(f"{name}.json")
    if not path.is_file():
        raise ConfigError("config", f"no preset named {name!r}")
    return from_dict(json.loads(path.read_text()))


def parse_config(path) -> RunConfig:
    """Read a JSON config file, or a shipped preset when ``path`` names one."""
    p = Path(path)
    if not p.exists():
        if str(path) in preset_names():
            return load_preset(str(path))
        raise ConfigError("config", f"file not found: {path}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"malformed JSON: {exc}") from None
    return from_dict(data)
