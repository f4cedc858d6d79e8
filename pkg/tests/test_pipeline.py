"""Config validation, end-to-end runs, golden reports and the CLI."""

from __future__ import annotations

import json
import os
from pathlib import Path

import pytest
import yaml

from chainardl import cli
from chainardl.errors import ConfigError
from chainardl.fixture import make_fixture
from chainardl.pipeline import exit_code, load_config, parse_config, run

from conftest import FIXTURE_DIR, BUNDLED_CONFIG, i2_workspace
from incidence import MODELS, OFF_AND_ON_CHAIN, variables

GOLDEN = Path(__file__).parent / "golden"
GOLDEN_FILES = ("long_run_two_dummy.txt", "short_run_two_dummy.txt", "long_run_one_dummy.txt",
                "short_run_one_dummy.txt", "bounds.txt")


def _doc(**over):
    doc = yaml.safe_load(BUNDLED_CONFIG.read_text())
    doc.update(over)
    return doc


class TestConfig:
    def test_bundled_config(self):
        cfg = load_config(BUNDLED_CONFIG)
        assert len(cfg.models) == 20
        assert cfg.sources[0].path == FIXTURE_DIR / "onchain.csv"
        assert cfg.diagnostic_orders == (1, 2)

    def test_empty_models_writes_nothing(self, tmp_path):
        with pytest.raises(ConfigError, match="at least one model"):
            cfg = parse_config(_doc(models=[]), BUNDLED_CONFIG.parent, tmp_path / "out")
            run(cfg)
        assert not (tmp_path / "out").exists()

    @pytest.mark.parametrize("over,match", [
        ({"colour": "blue"}, "unknown key"),
        ({"models": [{"preset": "M1", "extra": 1}]}, "unknown key"),
        ({"models": [{"preset": "M11"}]}, "unknown preset"),
        ({"models": [{"preset": "M1"}, {"preset": "M1"}]}, "duplicate"),
        ({"level": 0.2}, "level"),
        ({"p_max": 0}, "p_max"),
        ({"start": "2024-01-01", "end": "2023-01-01"}, "start"),
        ({"start": "yesterday"}, "start"),
        ({"fill": "backfill"}, "fill"),
        ({"models": [{"id": "X", "endogenous": []}]}, "empty"),
    ])
    def test_rejects(self, over, match):
        with pytest.raises(ConfigError, match=match):
            parse_config(_doc(**over), BUNDLED_CONFIG.parent)

    def test_same_id_in_both_dummy_sets(self):
        cfg = parse_config(_doc(models=[{"preset": "M1", "dummy_set": "both"}]), BUNDLED_CONFIG.parent)
        assert [(m.id, m.dummy_set) for m in cfg.models] == [("M1", "two_dummy"), ("M1", "one_dummy")]

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "none.yaml")

    def test_unknown_variable(self, tmp_path):
        cfg = parse_config(_doc(models=[{"id": "X", "endogenous": ["nope"]}]), BUNDLED_CONFIG.parent, tmp_path)
        with pytest.raises(ConfigError, match="nope"):
            run(cfg)


class TestBundledRun:
    def test_no_silent_drops(self, bundled_run):
        assert len(bundled_run.outcomes) == 20
        for o in bundled_run.outcomes:
            assert o.status in ("ecm", "difference", "i2_abort", "failed")
            if o.status in ("i2_abort", "failed"):
                assert o.message

    def test_all_estimated(self, bundled_run):
        assert {o.status for o in bundled_run.outcomes} == {"ecm"}
        assert exit_code(bundled_run) == 0

    def test_incidence(self, bundled_run):
        for o in bundled_run.outcomes:
            long_vars = {r.variable for r in o.long_run if r.section == 0}
            assert long_vars == variables(o.model.id) - {"total_supply"}
            short_vars = {r.variable for r in o.short_run}
            assert ("total_supply" in short_vars) == (o.model.id in OFF_AND_ON_CHAIN["total_supply"])
            allowed = variables(o.model.id) | set(o.model.exogenous) | {"btc_price", "const", "trend"}
            assert short_vars <= allowed

    def test_error_correction_negative(self, bundled_run):
        for o in bundled_run.outcomes:
            ec = next(r for r in o.long_run if r.key == "ec")
            assert ec.value < 0 and ec.stars == "***"

    def test_results_json(self, bundled_run):
        doc = json.loads((bundled_run.config.output / "results.json").read_text())
        assert doc["nobs"] == 1514
        assert set(doc["models"]["two_dummy"]) == set(MODELS)

    @pytest.mark.parametrize("name", GOLDEN_FILES)
    def test_golden(self, bundled_run, name):
        produced = (bundled_run.config.output / name).read_bytes()
        if os.environ.get("CHAINARDL_UPDATE_GOLDEN"):
            (GOLDEN / name).write_bytes(produced)
        assert produced == (GOLDEN / name).read_bytes()

    def test_byte_identical_rerun(self, bundled_run, tmp_path):
        again = run(load_config(BUNDLED_CONFIG, tmp_path))
        for a in bundled_run.files:
            assert a.read_bytes() == (tmp_path / a.name).read_bytes(), a.name
        assert len(again.files) == len(bundled_run.files)


def test_fixture_regenerates():
    for name, text in make_fixture().items():
        assert (FIXTURE_DIR / name).read_text(encoding="utf-8") == text


class TestI2:
    def test_abort_only_affected_model(self, tmp_path):
        result = run(load_config(i2_workspace(tmp_path)))
        status = {o.model.id: o for o in result.outcomes}
        assert status["A"].status == "ecm"
        assert status["B"].status == "i2_abort" and status["B"].i2_series == ("x2",)
        assert "x2" in status["B"].message
        assert exit_code(result) == 4

    def test_cli_exit_four(self, tmp_path, capsys):
        code = cli.main(["run", str(i2_workspace(tmp_path))])
        assert code == 4
        assert "x2" in capsys.readouterr().err


class TestCli:
    def test_run_bundled(self, tmp_path, capsys):
        assert cli.main(["run", "bundled", "--output", str(tmp_path)]) == 0
        assert "wrote 18 files" in capsys.readouterr().out

    def test_bad_config(self, tmp_path):
        p = tmp_path / "c.yaml"
        p.write_text("models: []\n")
        assert cli.main(["run", str(p)]) == 2

    def test_bad_arguments(self):
        assert cli.main(["frobnicate"]) == 2

    def test_data_error(self, tmp_path):
        (tmp_path / "d.csv").write_text("date,x\n2020-01-01,abc\n")
        (tmp_path / "c.yaml").write_text(
            "sources: [{path: d.csv}]\nstart: 2020-01-01\nend: 2020-01-02\nmodels: [{id: A, endogenous: [x]}]\n")
        assert cli.main(["run", str(tmp_path / "c.yaml"), "--output", str(tmp_path / "o")]) == 3

    def test_stats(self, capsys):
        assert cli.main(["stats", str(FIXTURE_DIR / "onchain.csv"), "--columns", "btc_price", "--json"]) == 0
        rec = json.loads(capsys.readouterr().out)
        assert rec[0]["n"] == 1514

    def test_unitroot(self, capsys):
        assert cli.main(["unitroot", str(FIXTURE_DIR / "onchain.csv"), "--column", "btc_price"]) == 0
        assert "order: I(1)" in capsys.readouterr().out

    def test_unitroot_unknown_column(self):
        assert cli.main(["unitroot", str(FIXTURE_DIR / "onchain.csv"), "--column", "nope"]) == 2

    def test_mc(self, tmp_path, capsys):
        assert cli.main(["mc", "jb_size", "--reps", "100", "--csv", str(tmp_path / "mc.csv")]) == 0
        assert "rejection at 0.05" in capsys.readouterr().out
        assert (tmp_path / "mc.csv").exists()
        assert cli.main(["mc", "nope"]) == 2
        assert cli.main(["mc", "jb_size", "--reps", "5"]) == 2

    def test_mc_list(self, capsys):
        assert cli.main(["mc", "--list"]) == 0
        assert "adf_size" in capsys.readouterr().out
