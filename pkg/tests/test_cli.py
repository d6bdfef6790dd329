import copy
import json
from pathlib import Path

import pytest

from dirac_scatter import cli
from dirac_scatter.errors import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
MINIMAL = {
    "schema_version": 1, "scenario": "scatter",
    "system": {"m": 1.0, "k": 2.0, "A": 0.5},
    "perturbation": {"kind": "exp_decay", "c": 0.3, "alpha": 1.0},
    "lambda_grid": [1.5],
    "output": {"dir": "out", "prefix": "scatter_minimal"},
}


def _with(**changes):
    d = copy.deepcopy(MINIMAL)
    for key, val in changes.items():
        section, _, field = key.partition("__")
        if field:
            d[section][field] = val
        else:
            d[section] = val
    return d


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_configs_validate(path):
    cfg = cli.load_config(path)
    assert cfg.lambda_grid


def test_minimal_config_parses():
    cfg = cli.parse_config(MINIMAL)
    assert cfg.scenario is cli.Scenario.SCATTER
    assert (cfg.system.m, cfg.system.k, cfg.system.A) == (1.0, 2.0, 0.5)
    assert cfg.lambda_grid == (1.5,)


def test_coulomb_strength_bound_reports_field():
    with pytest.raises(ConfigError) as exc:
        cli.parse_config(_with(system__A=2.5))
    assert exc.value.path == "system.A"


def test_gap_energy_rejected():
    with pytest.raises(ConfigError) as exc:
        cli.parse_config(_with(lambda_grid=[1.0]))
    assert exc.value.path == "lambda_grid[0]"
    assert "gap" in str(exc.value)


@pytest.mark.parametrize("change,path", [
    ({"schema_version": 2}, "schema_version"),
    ({"scenario": "nope"}, "scenario"),
    ({"lambda_grid": []}, "lambda_grid"),
    ({"perturbation": {"kind": "exp_decay", "c": 0.3, "alpha": -1.0}}, "perturbation.alpha"),
    ({"perturbation": {"kind": "mystery"}}, "perturbation.kind"),
])
def test_invalid_fields_reported(change, path):
    d = copy.deepcopy(MINIMAL)
    d.update(change)
    with pytest.raises(ConfigError) as exc:
        cli.parse_config(d)
    assert exc.value.path == path


def test_content_hash_is_order_independent():
    a = cli.parse_config(MINIMAL)
    b = cli.parse_config(json.loads(json.dumps(MINIMAL, sort_keys=True)))
    assert a.content_hash == b.content_hash


def test_scatter_run_is_deterministic(tmp_path):
    cfg = cli.parse_config(MINIMAL, base=tmp_path)
    paths = []
    for sub in ("a", "b"):
        report = cli.run(cfg, threads=1)
        paths.append(cli.emit(report, tmp_path / sub, formats=("csv",))["csv"])
    first, second = (p.read_bytes() for p in paths)
    assert first == second
    header = first.decode().splitlines()[0].split(",")
    assert tuple(header) == cli.CSV_COLUMNS


def test_threads_environment(monkeypatch):
    monkeypatch.setenv(cli.THREADS_ENV, "3")
    assert cli.resolve_threads(None) == 3
    assert cli.resolve_threads(2) == 2
    monkeypatch.setenv(cli.THREADS_ENV, "many")
    with pytest.raises(ConfigError):
        cli.resolve_threads(None)


def test_main_validate_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps(MINIMAL))
    assert cli.main(["validate", "--config", str(good)]) == cli.EXIT_OK
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(_with(system__A=3.0)))
    assert cli.main(["validate", "--config", str(bad)]) == cli.EXIT_CONFIG
    assert "system.A" in capsys.readouterr().err


def test_main_missing_file(tmp_path):
    assert cli.main(["validate", "--config", str(tmp_path / "none.json")]) == cli.EXIT_CONFIG


def test_main_run_writes_outputs(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(MINIMAL))
    code = cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "o"), "--threads", "1"])
    assert code == cli.EXIT_OK
    names = {p.name for p in (tmp_path / "o").iterdir()}
    assert {"scatter_minimal.csv", "scatter_minimal.json", "scatter_minimal_timing.json"} <= names
