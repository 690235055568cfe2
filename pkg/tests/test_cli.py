"""Config validation, CSV dialect, determinism, and exit-code wiring."""

import json
import os
from fractions import Fraction

import numpy as np
import pytest

from kedgelab import cli

UNIT_SQUARE = {"variant": "uniform_polygon",
               "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]}
DISK1 = {"variant": "disk", "radius": "1"}


def kedges_cfg(**over):
    cfg = {"experiment": "kedges", "seed": 17, "trials": 4,
           "distribution": UNIT_SQUARE, "n": [8], "k": [0, "half"]}
    cfg.update(over)
    return cfg


class TestResolveK:
    def test_forms(self):
        assert cli.resolve_k(3, 50) == 3
        assert cli.resolve_k("half", 50) == 24
        assert cli.resolve_k("n/2-2", 16) == 6
        assert cli.resolve_k("n/10", 50) == 5
        assert cli.resolve_k("n/4", 50) == 12
        assert cli.resolve_k("-1+n", 5) == 4

    def test_rejects(self):
        for bad in ("n**2", "m", "n/(0)", "__import__('os')", True):
            with pytest.raises(ValueError):
                cli.resolve_k(bad, 10)


class TestValidate:
    def test_good_config_clean(self):
        assert cli.validate_config(kedges_cfg()) == []

    def test_collects_every_violation(self):
        bad = {"experiment": "kedges", "trials": 0, "n": [],
               "k": ["n**3"], "distribution": {"variant": "nope"},
               "mystery": 1}
        msgs = cli.validate_config(bad)
        assert any("seed" in m for m in msgs)
        assert any("trials" in m for m in msgs)
        assert any("n grid" in m for m in msgs)
        assert any("k expression" in m for m in msgs)
        assert any("distribution" in m for m in msgs)
        assert any("mystery" in m for m in msgs)
        assert len(msgs) >= 6

    def test_unknown_kind(self):
        msgs = cli.validate_config({"experiment": "frobnicate", "seed": 0})
        assert any("unknown experiment kind" in m for m in msgs)

    def test_wrong_scalar_types(self):
        msgs = cli.validate_config(kedges_cfg(seed=-1, workers=0))
        assert any("seed" in m for m in msgs)
        assert any("workers" in m for m in msgs)

    def test_tc_count_modular_n(self):
        cfg = {"experiment": "tc-count", "seed": 0, "body": DISK1,
               "source": "curved_cross", "n": [12], "k": [2]}
        msgs = cli.validate_config(cfg)
        assert any("multiple of 8" in m for m in msgs)

    def test_tc_count_random_needs_trials(self):
        cfg = {"experiment": "tc-count", "seed": 0, "body": DISK1,
               "source": "random", "n": [5], "k": [1]}
        assert any("trials" in m for m in cli.validate_config(cfg))

    def test_run_raises_on_invalid(self):
        with pytest.raises(cli.ConfigInvalid):
            cli.run({"experiment": "kedges"})


class TestFormatting:
    def test_fmt(self):
        assert cli.fmt(None) == ""
        assert cli.fmt(True) == "1"
        assert cli.fmt(7) == "7"
        assert cli.fmt(np.int64(7)) == "7"
        assert cli.fmt(Fraction(3, 4)) == "3/4"
        assert cli.fmt(1.0 / 3.0) == "0.33333333333333331"

    def test_csv_dialect(self):
        status, text = cli.run(kedges_cfg())
        assert status == 0
        assert "\r" not in text
        assert text.endswith("\n")
        lines = text.split("\n")
        assert lines[0] == cli.CSV_HEADER
        width = len(cli.CSV_HEADER.split(","))
        for line in lines[1:-1]:
            assert len(line.split(",")) == width

    def test_rows_sorted_by_grid(self):
        status, text = cli.run(kedges_cfg(n=[10, 8]))
        rows = [ln.split(",") for ln in text.strip().split("\n")[1:]]
        keys = [(int(r[3]), int(r[4]), r[6]) for r in rows]
        assert keys == sorted(keys)


class TestDeterminism:
    def test_worker_count_invariance(self):
        _, a = cli.run(kedges_cfg(workers=1))
        _, b = cli.run(kedges_cfg(workers=2))
        assert a == b

    def test_rerun_identical(self):
        _, a = cli.run(kedges_cfg())
        _, b = cli.run(kedges_cfg())
        assert a == b

    def test_seed_changes_output(self):
        _, a = cli.run(kedges_cfg())
        _, b = cli.run(kedges_cfg(seed=18))
        assert a != b

    def test_scaling_worker_invariance(self):
        cfg = {"experiment": "tc-scaling", "seed": 0, "trials": 4,
               "rho": 1.0, "side": 4.0, "n": [10, 14]}
        _, a = cli.run(dict(cfg, workers=1))
        _, b = cli.run(dict(cfg, workers=2))
        assert a == b


class TestRunners:
    def test_chains(self):
        status, text = cli.run({"experiment": "chains", "seed": 3, "trials": 2,
                                "distribution": UNIT_SQUARE, "n": [8], "k": [1]})
        assert status == 0
        assert "chain_count_bound" in text and ",yes," in text

    def test_expected(self):
        status, text = cli.run({"experiment": "expected", "seed": 5, "trials": 30,
                                "pair_samples": 200, "distribution": UNIT_SQUARE,
                                "n": [9], "k": [0]})
        assert status == 0
        assert "direct_mean_k_edges" in text
        assert "formula_mean_k_edges" in text
        assert "count_bound" in text

    def test_curve_intersect(self):
        status, text = cli.run({"experiment": "curve-intersect", "seed": 11,
                                "trials": 3, "n": [7], "r": [1]})
        assert status == 0
        assert "intersection_bound" in text

    def test_question1_leaderboard_schema(self):
        status, text = cli.run({"experiment": "question1", "seed": 4,
                                "budget": 4, "keep": 2, "n": [7], "r": [1]})
        assert status == 0
        assert text.startswith("trial,n,r,k,total,ratio_nr,ratio_nr2")

    def test_tc_count_square_cross(self):
        status, text = cli.run({"experiment": "tc-count", "seed": 1,
                                "body": {"variant": "square"},
                                "source": "square_cross", "n": [8], "k": ["n/2-2"]})
        assert status == 0
        row = [ln for ln in text.split("\n") if "tc_k_sets" in ln][0]
        assert row.split(",")[7] == "8"

    def test_tc_count_curved_cross(self):
        status, text = cli.run({"experiment": "tc-count", "seed": 1, "body": DISK1,
                                "source": "curved_cross", "n": [8], "k": ["n/2"]})
        assert status == 0
        row = [ln for ln in text.split("\n") if "tc_k_sets" in ln][0]
        assert row.split(",")[7] == "9"

    def test_tc_count_random(self):
        status, text = cli.run({"experiment": "tc-count", "seed": 9, "trials": 2,
                                "body": DISK1, "source": "random",
                                "n": [5], "k": [2]})
        assert status == 0
        assert "subset_edge_bound" in text

    def test_growth(self):
        status, text = cli.run({"experiment": "growth", "seed": 2, "trials": 2,
                                "body": DISK1, "n": [5]})
        assert status == 0
        assert "growth_bound" in text and ",yes," in text

    def test_violation_sets_status(self, monkeypatch):
        rec = cli.ResultRecord("growth", "growth_bound", "1",
                               satisfied="VIOLATION", seed=0)
        monkeypatch.setitem(cli._RUNNERS, "growth", lambda cfg: [rec])
        status, text = cli.run({"experiment": "growth", "seed": 0, "trials": 1,
                                "body": DISK1, "n": [4]})
        assert status == 1
        assert ",VIOLATION," in text


class TestMain:
    def write_cfg(self, tmp_path, cfg):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(cfg), encoding="utf-8")
        return str(p)

    def test_validate_ok(self, tmp_path, capsys):
        p = self.write_cfg(tmp_path, kedges_cfg())
        assert cli.main(["validate", "--config", p]) == 0
        assert capsys.readouterr().out.strip() == "ok"

    def test_validate_prints_violations(self, tmp_path, capsys):
        p = self.write_cfg(tmp_path, {"experiment": "kedges"})
        assert cli.main(["validate", "--config", p]) == 2
        out = capsys.readouterr().out
        assert "seed" in out and "distribution" in out

    def test_missing_file(self, tmp_path):
        assert cli.main(["validate", "--config", str(tmp_path / "nope.json")]) == 2

    def test_malformed_json(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text("{not json", encoding="utf-8")
        assert cli.main(["validate", "--config", str(p)]) == 2

    def test_subcommand_mismatch(self, tmp_path):
        p = self.write_cfg(tmp_path, kedges_cfg())
        assert cli.main(["chains", "--config", p]) == 2

    def test_run_writes_file(self, tmp_path):
        p = self.write_cfg(tmp_path, kedges_cfg())
        out = tmp_path / "res.csv"
        assert cli.main(["kedges", "--config", p, "--out", str(out)]) == 0
        text = out.read_text(encoding="utf-8")
        assert text.startswith(cli.CSV_HEADER)

    def test_out_in_config(self, tmp_path):
        out = tmp_path / "res.csv"
        p = self.write_cfg(tmp_path, kedges_cfg(out=str(out)))
        assert cli.main(["kedges", "--config", p]) == 0
        assert out.exists()

    def test_stdout_when_no_out(self, tmp_path, capsys):
        p = self.write_cfg(tmp_path, kedges_cfg())
        assert cli.main(["kedges", "--config", p]) == 0
        assert capsys.readouterr().out.startswith(cli.CSV_HEADER)

    def test_seed_override(self, tmp_path):
        p = self.write_cfg(tmp_path, kedges_cfg())
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        cli.main(["kedges", "--config", p, "--out", str(a)])
        cli.main(["kedges", "--config", p, "--out", str(b), "--seed", "99"])
        assert a.read_bytes() != b.read_bytes()
        assert b",99" in b.read_bytes()

    def test_worker_flag_bytes_identical(self, tmp_path):
        p = self.write_cfg(tmp_path, kedges_cfg())
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        cli.main(["kedges", "--config", p, "--out", str(a), "--workers", "1"])
        cli.main(["kedges", "--config", p, "--out", str(b), "--workers", "3"])
        assert a.read_bytes() == b.read_bytes()
