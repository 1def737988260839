import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from resona1d.config import alpha_grid, config_hash, from_dict, load_preset, parse_config, preset_names
from resona1d.errors import ConfigError

BASE = {
    "chain": {"lengths": [1, 1], "gaps": [1, 2]},
    "material": {"delta": 1e-4},
    "modulation": {"Omega": 0.03, "eps_kappa": 0.2},
}


def mutate(path, value):
    data = json.loads(json.dumps(BASE))
    node = data
    for key in path[:-1]:
        node = node[key]
    if value is KeyError:
        del node[path[-1]]
    else:
        node[path[-1]] = value
    return data


def test_presets_parse():
    assert {"trio-modulated", "single-modulated", "uneven-static", "equidistant-static", "uneven-kappa", "equidistant-kappa"} <= set(preset_names())
    for name in preset_names():
        cfg = load_preset(name)
        assert cfg.name == name


def test_kappa_preset_modulation_values():
    for name in ("uneven-kappa", "equidistant-kappa"):
        mod = load_preset(name).modulation
        assert mod.omega == 0.03
        np.testing.assert_allclose(mod.eps_kappa, 0.2)
        np.testing.assert_allclose(mod.phi_kappa, [0, math.pi / 2, math.pi])


def test_scalar_modulation_broadcasts():
    cfg = from_dict(BASE)
    np.testing.assert_array_equal(cfg.modulation.eps_kappa, [0.2, 0.2])
    assert cfg.method == "floquet" and cfg.truncation_K == 3 and cfg.alpha_grid == 101


@pytest.mark.parametrize("path, value, field", [
    (("chain", "gaps"), KeyError, "chain.gaps"),
    (("chain", "gaps"), [1, 2, 3], "chain.gaps"),
    (("chain", "lengths"), [1, -1], "chain.lengths"),
    (("material", "delta"), 0, "material.delta"),
    (("modulation", "Omega"), KeyError, "modulation.Omega"),
    (("modulation", "eps_kappa"), 1.2, "modulation.eps_kappa"),
    (("modulation", "phi_rho"), [0.0], "modulation.phi_rho"),
    (("alpha_grid",), 100, "alpha_grid"),
    (("truncation_K",), 0, "truncation_K"),
    (("method",), "magic", "method"),
    (("tolerances",), {"speed": 1.0}, "tolerances.speed"),
])
def test_invalid_fields_are_named(path, value, field):
    with pytest.raises(ConfigError) as info:
        from_dict(mutate(path, value))
    assert info.value.field == field
    assert field in str(info.value)


def test_parse_config_file_and_errors(tmp_path):
    good = tmp_path / "c.json"
    good.write_text(json.dumps(BASE))
    assert parse_config(good).n == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        parse_config(bad)
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "missing.json")
    assert parse_config("uneven-kappa").name == "uneven-kappa"


def test_hash_ignores_key_order_and_tracks_values():
    a = from_dict(BASE)
    b = from_dict(json.loads(json.dumps(BASE, sort_keys=True)))
    assert a.config_hash == b.config_hash
    assert from_dict(mutate(("modulation", "Omega"), 0.04)).config_hash != a.config_hash
    assert a.config_hash == config_hash(a.raw) and len(a.config_hash) == 16


def test_replace_revalidates():
    cfg = from_dict(BASE)
    assert cfg.replace(alpha_grid=11).grid().size == 11
    with pytest.raises(ConfigError):
        cfg.replace(alpha_grid=10)


@given(st.integers(1, 200), st.floats(0.1, 10))
def test_alpha_grid_is_mirror_symmetric(k, half):
    g = alpha_grid(2 * k + 1, half)
    np.testing.assert_array_equal(g, -g[::-1])
    assert g[k] == 0.0 and g[-1] == pytest.approx(half)
