import json

import pytest

from rentmech.config import load_config, parse_config
from rentmech.dist import Uniform
from rentmech.errors import ConfigError

BASE = {"horizon": 3, "distribution": {"kind": "uniform", "lo": 0, "hi": 1},
        "reward": {"class": "consumer_surplus"}}


def test_parse_defaults():
    cfg = parse_config(BASE)
    assert cfg.horizon == 3 and cfg.iid and cfg.shared == Uniform(0.0, 1.0)
    assert cfg.kind == "fixed_rate" and cfg.ironing_grid == 10_000


def test_error_paths():
    with pytest.raises(ConfigError) as e:
        parse_config({**BASE, "horizon": 0})
    assert e.value.path == "horizon"
    with pytest.raises(ConfigError) as e:
        parse_config({**BASE, "distribution": {"kind": "uniform", "lo": 0, "hi": "x"}})
    assert e.value.path == "distribution.hi"
    with pytest.raises(ConfigError) as e:
        parse_config({**BASE, "grid": {"ironing": 4}})
    assert e.value.path == "grid.ironing"
    bad = {k: v for k, v in BASE.items() if k != "distribution"}
    bad["distributions"] = [{"kind": "uniform", "lo": 0, "hi": 1}] * 2
    with pytest.raises(ConfigError) as e:
        parse_config(bad)
    assert e.value.path == "distributions"
    bad["distributions"].append({"kind": "uniform", "lo": 2, "hi": 1})
    with pytest.raises(ConfigError) as e:
        parse_config(bad)
    assert e.value.path == "distributions[2].hi"


def test_family_consistency():
    with pytest.raises(ConfigError) as e:
        parse_config({**BASE, "kind": "threshold", "reward": {"class": "welfare"}})
    assert e.value.path == "reward.class"
    ds = [{"kind": "uniform", "lo": 0, "hi": h} for h in (1, 2, 3)]
    cfg = {k: v for k, v in BASE.items() if k != "distribution"}
    with pytest.raises(ConfigError):
        parse_config({**cfg, "distributions": ds, "kind": "threshold"})
    with pytest.raises(ConfigError):
        parse_config({**BASE, "kind": "custom_menu"})


def test_load_errors(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError, match="line 1"):
        load_config(p)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    p.write_text(json.dumps(BASE))
    assert load_config(p).horizon == 3
