import csv
import json

import pytest

from idsfx.cli import main
from tests.conftest import make_blob_dataset, write_dataset_csv


@pytest.fixture
def blob_csv(tmp_path):
    d = make_blob_dataset(n_rows=100, n_numeric=4, n_classes=2, seed=1)
    return write_dataset_csv(d, tmp_path / "blobs.csv")


def _flags(blob_csv, out, extra=()):
    return ["--dataset", str(blob_csv), "--profile", "generic",
            "--out", str(out), "--components", "4", "--select", "3",
            "--seed", "11", *extra]


class TestInspect:
    def test_ok(self, blob_csv, capsys):
        assert main(["inspect", "--dataset", str(blob_csv)]) == 0
        out = capsys.readouterr().out
        assert "rows: 100" in out
        assert "label column: label" in out

    def test_empty_file_exit_2(self, tmp_path, capsys):
        p = tmp_path / "empty.csv"
        p.write_text("")
        assert main(["inspect", "--dataset", str(p)]) == 2
        assert "empty dataset" in capsys.readouterr().err

    def test_missing_file_exit_1(self, tmp_path, capsys):
        assert main(["inspect", "--dataset", str(tmp_path / "nope.csv")]) == 1


class TestFit:
    def test_outputs(self, blob_csv, tmp_path):
        out = tmp_path / "run"
        assert main(["fit", *_flags(blob_csv, out)]) == 0
        assert (out / "pipeline.json").exists()
        assert (out / "run_config.json").exists()
        rows = list(csv.reader((out / "chi2_scores.csv").open()))
        assert rows[0] == ["feature_name", "score"]
        assert len(rows) == 5  # header + U component scores
        log = json.loads((out / "fit_log.json").read_text())
        assert log["iterations_run"] >= 1

    def test_v_above_u_exit_2(self, blob_csv, tmp_path):
        out = tmp_path / "run"
        rc = main(["fit", "--dataset", str(blob_csv), "--out", str(out),
                   "--components", "3", "--select", "9"])
        assert rc == 2
        assert not (out / "pipeline.json").exists()

    def test_config_file_with_flag_override(self, blob_csv, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"dataset": str(blob_csv), "seed": 1,
                                   "pipeline": {"u": 4, "v": 2}}))
        out = tmp_path / "run"
        assert main(["fit", "--config", str(cfg), "--out", str(out),
                     "--select", "3"]) == 0
        echoed = json.loads((out / "run_config.json").read_text())
        assert echoed["pipeline"]["v"] == 3

    def test_bad_config_json_exit_2(self, blob_csv, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{not json")
        assert main(["fit", "--config", str(cfg)]) == 2


class TestTransform:
    def test_round_trip(self, blob_csv, tmp_path):
        run = tmp_path / "run"
        assert main(["fit", *_flags(blob_csv, run)]) == 0
        out = tmp_path / "tr"
        assert main(["transform", "--pipeline", str(run / "pipeline.json"),
                     "--dataset", str(blob_csv), "--out", str(out)]) == 0
        lines = (out / "transformed.csv").read_text().splitlines()
        assert len(lines) == 101
        assert len(lines[0].split(",")) == 3


class TestEvaluate:
    def test_outputs_and_determinism(self, blob_csv, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["evaluate", *_flags(blob_csv, a)]) == 0
        printed = capsys.readouterr().out
        assert "knn/extracted: accuracy" in printed
        assert main(["evaluate", *_flags(blob_csv, b)]) == 0
        for name in ("report.csv", "report.json", "pipeline.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()
        rows = list(csv.reader((a / "report.csv").open()))
        assert len(rows) == 13  # header + 6 classifiers x 2 variants
        assert json.loads((a / "timings.json").read_text())


class TestCorrAndChi2:
    def test_corr_tables(self, blob_csv, tmp_path):
        out = tmp_path / "corr"
        assert main(["corr", *_flags(blob_csv, out)]) == 0
        before = list(csv.reader((out / "corr_before.csv").open()))
        after = list(csv.reader((out / "corr_after.csv").open()))
        assert len(before) == 6    # header + 4 numeric + 1 categorical
        assert len(after) == 4     # header + V selected components

    def test_chi2_raw_scores(self, blob_csv, tmp_path):
        out = tmp_path / "chi2"
        assert main(["chi2", *_flags(blob_csv, out)]) == 0
        rows = list(csv.reader((out / "chi2_raw.csv").open()))
        assert rows[0] == ["feature_name", "score"]
        assert len(rows) == 6
        scores = [float(r[1]) for r in rows[1:]]
        assert scores == sorted(scores, reverse=True)
