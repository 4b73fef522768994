"""Configuration schema, loading and grid expansion."""

from pathlib import Path

import pytest

from cvlab.errors import ConfigError
from cvlab.scan import from_dict, load_config
from cvlab.scan.config import expand_axis

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


@pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.yaml")), ids=lambda p: p.stem)
def test_shipped_configs_validate(path):
    cfg = load_config(path)
    assert cfg.points()


def test_unknown_keys_are_all_reported():
    doc = {
        "experiment": "baseline-trajectories",
        "colour": "blue",
        "system": {"kappa": 1.0, "kapa": 2.0},
        "integrator": {"rtol": 1e-6},
        "grid": {"s_c": [1.0]},
    }
    with pytest.raises(ConfigError) as info:
        from_dict(doc)
    text = "\n".join(info.value.problems)
    for key in ("colour", "system.kapa", "integrator.rtol", "s_c"):
        assert key in text
    assert len(info.value.problems) == 4


@pytest.mark.parametrize("doc", [
    {},
    {"experiment": "nope"},
    {"experiment": "freezing", "system": {"kappa": -1.0}},
    {"experiment": "freezing", "grid": {"generator": ["lindblad"]}},
    {"experiment": "freezing", "grid": {"s_a": ["x"]}},
    {"experiment": "freezing", "grid": {"s_a": {"start": 1, "stop": 0, "step": 0.5}}},
    {"experiment": "freezing", "grid_mode": "zip", "grid": {"s_a": [1, 2], "s_b": [1]}},
    {"experiment": "freezing", "options": {"freezing": {"t_n": -1.0}}},
])
def test_invalid_documents(doc):
    with pytest.raises(ConfigError):
        from_dict(doc)


def test_non_mapping_and_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        from_dict([1, 2])
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("experiment: [unclosed\n")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_expand_axis():
    assert expand_axis("s_a", {"start": 0.0, "stop": 0.3, "step": 0.05}) == \
        [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3]
    assert expand_axis("delta_AB", {"start": -2.0, "stop": 0.0, "step": 0.05})[-1] == 0.0
    assert len(expand_axis("delta_AB", {"start": -2.0, "stop": 0.0, "step": 0.05})) == 41
    assert expand_axis("generator", ["markov", "o0"]) == ["markov", "o0"]
    assert expand_axis("gamma", [1, 2]) == [1.0, 2.0]


def test_product_and_zip_modes():
    base = {"experiment": "baseline-heatmap", "grid": {"s_a": [1, 2], "s_b": [3, 4]}}
    pts = from_dict(base).points()
    assert pts == [{"s_a": 1.0, "s_b": 3.0}, {"s_a": 1.0, "s_b": 4.0},
                   {"s_a": 2.0, "s_b": 3.0}, {"s_a": 2.0, "s_b": 4.0}]
    zipped = from_dict({**base, "grid_mode": "zip"}).points()
    assert zipped == [{"s_a": 1.0, "s_b": 3.0}, {"s_a": 2.0, "s_b": 4.0}]


def test_defaults_and_complex_inputs():
    cfg = from_dict({"experiment": "revivals", "input": {"alpha": [0.5, -0.5], "beta": 0.25},
                     "drive": {"kind": "sinusoidal", "delta0": -2.0, "omega_mod": 0.5}})
    assert cfg.generator == "markov"
    assert cfg.input.alpha == 0.5 - 0.5j and cfg.input.beta == 0.25
    assert cfg.system.drive.kind == "sinusoidal"
    assert cfg.integrator.rel_tol == 1e-10
    assert cfg.options["deviation_floor"] == 0.01
    assert cfg.points() == [{}]
