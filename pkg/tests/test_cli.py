import json
import os

import numpy as np
import pytest

from triangulab.cli import main
from triangulab.experiments import REGISTRY, ConfigError, ExperimentConfig, run_experiment


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_list_command(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert sorted(out) == sorted(REGISTRY)
    assert len(out) == 15


def test_run_happy_path(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        {"experiment": "macaev-norms", "output_dir": str(tmp_path / "out")},
    )
    assert main(["run", "--config", cfg]) == 0
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["experiment"] == "macaev-norms"
    assert {"name", "anchor", "value", "threshold", "pass"} <= set(summary["checks"][0])
    assert all(c["pass"] for c in summary["checks"])


def test_unknown_experiment_is_config_error(tmp_path):
    cfg = write_config(tmp_path, {"experiment": "unknown"})
    assert main(["run", "--config", cfg]) == 2


def test_unknown_keys_rejected(tmp_path):
    cfg = write_config(tmp_path, {"experiment": "macaev-norms", "bogus": 1})
    assert main(["run", "--config", cfg]) == 2
    cfg = write_config(tmp_path, {"experiment": "macaev-norms", "grid": {"m": 4}})
    assert main(["run", "--config", cfg]) == 2
    cfg = write_config(tmp_path, {"experiment": "macaev-norms", "tolerances": {"nope": 1.0}})
    assert main(["run", "--config", cfg]) == 2


def test_invalid_json_is_config_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["run", "--config", str(path)]) == 2


def test_missing_file_is_config_error(tmp_path):
    assert main(["run", "--config", str(tmp_path / "absent.json")]) == 2


def test_failed_check_exits_one(tmp_path):
    cfg = write_config(
        tmp_path,
        {
            "experiment": "sigma-equality",
            "tolerances": {"sigma_distance": 1e-30},
            "output_dir": str(tmp_path / "out"),
        },
    )
    assert main(["run", "--config", cfg]) == 1


def test_numerical_error_exits_three(tmp_path):
    # a 4-cell grid cannot resolve the fixed probe frequencies: aliasing guard
    cfg = write_config(
        tmp_path,
        {
            "experiment": "prop54",
            "grid": {"n": 4},
            "output_dir": str(tmp_path / "out"),
        },
    )
    assert main(["run", "--config", cfg]) == 3


def test_config_strictness_at_dataclass_level():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"experiment": "macaev-norms", "kernel": {"zeta": 1}})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"experiment": "macaev-norms", "kernel": {"s": "nope"}})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict([1, 2, 3])
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({})


def test_identical_config_gives_byte_identical_artifacts(tmp_path):
    outs = []
    for run in ("a", "b"):
        outdir = tmp_path / run
        cfg = ExperimentConfig.from_dict(
            {
                "experiment": "fractional-powers",
                "seed": 7,
                "output_dir": str(outdir),
            }
        )
        run_experiment(cfg)
        outs.append(outdir)
    for name in ("summary.json", "power_law.csv"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_summary_checks_carry_anchors(tmp_path):
    cfg = ExperimentConfig.from_dict(
        {"experiment": "fractional-powers", "output_dir": str(tmp_path / "out")}
    )
    summary = run_experiment(cfg)
    assert all(c.anchor for c in summary.checks)
    payload = json.loads(summary.to_json())
    assert all(c["anchor"] for c in payload["checks"])


def test_cache_roundtrip_reuses_expensive_build(tmp_path):
    cache = tmp_path / "cache"
    cfg = ExperimentConfig.from_dict(
        {
            "experiment": "levinson",
            "grid": {"n": 48},
            "kernel": {"beta": 2.0},
            "ladder": {"y": [3.5, 2.5, 1.8, 1.2, 0.9, 0.6]},
            "output_dir": str(tmp_path / "out1"),
            "cache_dir": str(cache),
        }
    )
    try:
        run_experiment(cfg)
    except Exception:
        pass  # verdict quality at this tiny grid is not the point here
    files = list(cache.glob("ebeta_*.txt"))
    assert len(files) == 1
    # a second run must reuse the cached matrix byte for byte
    before = files[0].read_bytes()
    cfg2 = ExperimentConfig.from_dict(
        {
            "experiment": "levinson",
            "grid": {"n": 48},
            "kernel": {"beta": 2.0},
            "ladder": {"y": [3.5, 2.5, 1.8, 1.2, 0.9, 0.6]},
            "output_dir": str(tmp_path / "out2"),
            "cache_dir": str(cache),
        }
    )
    try:
        run_experiment(cfg2)
    except Exception:
        pass
    assert files[0].read_bytes() == before
