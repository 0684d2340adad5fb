"""Command-line front end: exit codes, stdout payloads, stderr envelopes.

The CLI must print exactly what the HTTP endpoints serve (plus a
trailing newline) so batch pipelines and the service can be mixed; the
last test here locks the two front ends together byte for byte.
"""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from crowdconsensus.cli import main
from crowdconsensus.service import create_app
from crowdconsensus.store import Store

SPEC = {
    "dataset_id": "CLISIM",
    "created_on": "2026-05-01",
    "n_segments": 10,
    "polyp_fraction": 0.5,
    "views_per_segment": 3,
    "workers": [
        {"kind": "reliable", "count": 3, "p_correct": 0.9},
        {"kind": "constant", "count": 1, "answer": "POLYP"},
    ],
    "seed": 99,
}


@pytest.fixture()
def store_dir(tmp_path, tiny_dataset):
    root = tmp_path / "datasets"
    Store(root).save(tiny_dataset)
    return root


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    assert err == ""
    return json.loads(out)


def stderr_envelope(err):
    # usage errors print help first; the envelope is the last line
    body = json.loads(err.strip().splitlines()[-1])
    assert set(body) == {"code", "message", "detail"}
    return body


class TestConsensusCommand:
    def test_default_threshold(self, capsys, store_dir):
        body = run_json(
            capsys, "consensus", "--store", str(store_dir), "--dataset", "TINY"
        )
        assert body["threshold"] == 50.0
        assert body["confusion"] == {"tp": 1, "fp": 0, "tn": 1, "fn": 1}

    def test_threshold_flag(self, capsys, store_dir):
        body = run_json(
            capsys,
            "consensus",
            "--store",
            str(store_dir),
            "--dataset",
            "TINY",
            "--threshold",
            "0",
        )
        assert body["n_polyp_labels"] == 4

    def test_sort_flag(self, capsys, store_dir):
        body = run_json(
            capsys,
            "consensus",
            "--store",
            str(store_dir),
            "--dataset",
            "TINY",
            "--sort",
            "accuracy",
        )
        assert [r["worker_id"] for r in body["rows"]] == ["W2", "W3", "W1"]

    def test_out_of_range_threshold_is_validation(self, capsys, store_dir):
        code, out, err = run(
            capsys,
            "consensus",
            "--store",
            str(store_dir),
            "--dataset",
            "TINY",
            "--threshold",
            "101",
        )
        assert code == 1
        assert out == ""
        assert stderr_envelope(err)["code"] == "validation"

    def test_unknown_dataset_is_validation(self, capsys, store_dir):
        code, _, err = run(
            capsys, "consensus", "--store", str(store_dir), "--dataset", "NOPE"
        )
        assert code == 1
        body = stderr_envelope(err)
        assert body["code"] == "validation"
        assert "NOPE" in body["message"]

    def test_missing_flag_is_usage_error(self, capsys, store_dir):
        code, _, err = run(capsys, "consensus", "--store", str(store_dir))
        assert code == 1
        assert "usage:" in err
        assert stderr_envelope(err)["code"] == "usage"

    def test_unknown_subcommand_is_usage_error(self, capsys):
        code, _, err = run(capsys, "frobnicate")
        assert code == 1
        assert stderr_envelope(err)["code"] == "usage"


class TestSweepCommand:
    def test_csv_format(self, capsys, store_dir):
        code, out, err = run(
            capsys,
            "sweep",
            "--store",
            str(store_dir),
            "--dataset",
            "TINY",
            "--step",
            "50",
            "--format",
            "csv",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "threshold,sensitivity,specificity,n_polyp_labels"
        assert len(lines) == 4
        assert lines[1].startswith("0.0,")
        assert lines[3].startswith("100.0,")

    def test_json_format(self, capsys, store_dir):
        body = run_json(
            capsys,
            "sweep",
            "--store",
            str(store_dir),
            "--dataset",
            "TINY",
            "--step",
            "25",
        )
        assert [p["threshold"] for p in body["points"]] == [
            0.0,
            25.0,
            50.0,
            75.0,
            100.0,
        ]

    def test_zero_step_is_validation(self, capsys, store_dir):
        code, _, err = run(
            capsys,
            "sweep",
            "--store",
            str(store_dir),
            "--dataset",
            "TINY",
            "--step",
            "0",
        )
        assert code == 1
        assert stderr_envelope(err)["code"] == "validation"


class TestAnomaliesCommand:
    def test_suspects(self, capsys, store_dir):
        body = run_json(
            capsys, "anomalies", "--store", str(store_dir), "--dataset", "TINY"
        )
        assert [s["worker_id"] for s in body["suspects"]] == ["W3"]


class TestEmbedCommand:
    def test_mds_json(self, capsys, store_dir):
        body = run_json(
            capsys, "embed", "--store", str(store_dir), "--dataset", "TINY"
        )
        assert body["method"] == "mds"
        assert {p["id"] for p in body["points"]} == {"W1", "W2", "W3"}

    def test_csv_export(self, capsys, store_dir):
        code, out, _ = run(
            capsys,
            "embed",
            "--store",
            str(store_dir),
            "--dataset",
            "TINY",
            "--format",
            "csv",
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "item_id,x,y,lightness,arc_fraction"
        assert len(lines) == 4

    def test_weights_flag(self, capsys, store_dir):
        body = run_json(
            capsys,
            "embed",
            "--store",
            str(store_dir),
            "--dataset",
            "TINY",
            "--weights",
            "gender:2,location",
        )
        assert body["weights"] == {"gender": 2.0, "location": 1.0}

    def test_unknown_weight_axis(self, capsys, store_dir):
        code, _, err = run(
            capsys,
            "embed",
            "--store",
            str(store_dir),
            "--dataset",
            "TINY",
            "--weights",
            "shoe_size",
        )
        assert code == 1
        assert stderr_envelope(err)["code"] == "validation"


class TestReportCommand:
    def test_sections(self, capsys, store_dir):
        body = run_json(
            capsys, "report", "--store", str(store_dir), "--dataset", "TINY"
        )
        assert set(body) == {"overview", "timeline", "wordcloud"}
        assert body["overview"]["n_workers"] == 3
        assert [b["dataset_id"] for b in body["timeline"]["bars"]] == ["TINY"]


class TestSimulateCommand:
    def test_writes_files_and_store(self, capsys, tmp_path):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(SPEC))
        out_dir = tmp_path / "out"
        store_dir = tmp_path / "datasets"
        body = run_json(
            capsys,
            "simulate",
            "--spec",
            str(spec_path),
            "--out",
            str(out_dir),
            "--store",
            str(store_dir),
        )
        assert body["dataset"]["id"] == "CLISIM"
        assert body["dataset"]["n_responses"] == 30
        assert set(body["files"]) == {
            "manifest.json",
            "responses.csv",
            "workers.csv",
            "segments.csv",
            "comments.csv",
            "annotations.log",
        }
        for name in body["files"]:
            assert (out_dir / name).exists()
        assert Store(store_dir).load("CLISIM").id == "CLISIM"

    def test_missing_spec_file_is_validation(self, capsys, tmp_path):
        code, _, err = run(capsys, "simulate", "--spec", str(tmp_path / "no.json"))
        assert code == 1
        assert stderr_envelope(err)["code"] == "validation"


class TestIngestCommand:
    def test_simulate_then_ingest_round_trips(self, capsys, tmp_path):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(SPEC))
        out_dir = tmp_path / "out"
        run_json(capsys, "simulate", "--spec", str(spec_path), "--out", str(out_dir))

        store_dir = tmp_path / "datasets"
        body = run_json(
            capsys,
            "ingest",
            "--store",
            str(store_dir),
            "--manifest",
            str(out_dir / "manifest.json"),
            "--responses",
            str(out_dir / "responses.csv"),
            "--workers",
            str(out_dir / "workers.csv"),
            "--segments",
            str(out_dir / "segments.csv"),
            "--comments",
            str(out_dir / "comments.csv"),
        )
        assert body["dataset"]["id"] == "CLISIM"
        assert body["dataset"]["n_responses"] == 30

    def test_duplicate_dataset(self, capsys, tmp_path):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(SPEC))
        store_dir = tmp_path / "datasets"
        run_json(
            capsys, "simulate", "--spec", str(spec_path), "--store", str(store_dir)
        )
        code, _, err = run(
            capsys, "simulate", "--spec", str(spec_path), "--store", str(store_dir)
        )
        assert code == 1
        assert stderr_envelope(err)["code"] == "duplicate_dataset"

    def test_bad_rows_emit_ingest_error(self, capsys, tmp_path, store_dir):
        out_dir = tmp_path / "bad"
        out_dir.mkdir()
        manifest = {
            "dataset_id": "BAD",
            "created_on": "2026-03-01",
            "fov_degrees": 90,
            "flythrough_speed": 1,
        }
        (out_dir / "manifest.json").write_text(json.dumps(manifest))
        (out_dir / "workers.csv").write_bytes(
            b"worker_id,age_bracket,gender,education_level,medical_expertise,"
            b"visualization_expertise,reward_tier,location\n"
            b"W1,25-34,female,bachelor,1,1,standard,europe\n"
        )
        (out_dir / "segments.csv").write_bytes(
            b"segment_id,dataset_id,ordinal,direction,orientation,ground_truth\n"
            b"S1,BAD,1,ANTEGRADE,SUPINE,POLYP\n"
        )
        (out_dir / "responses.csv").write_bytes(
            b"worker_id,segment_id,answer,response_time_ms,presentation_index,"
            b"submitted_at\n"
            b"W1,S1,MAYBE,100,1,2026-03-01T10:00:00Z\n"
        )
        code, _, err = run(
            capsys,
            "ingest",
            "--store",
            str(tmp_path / "s"),
            "--manifest",
            str(out_dir / "manifest.json"),
            "--responses",
            str(out_dir / "responses.csv"),
            "--workers",
            str(out_dir / "workers.csv"),
            "--segments",
            str(out_dir / "segments.csv"),
        )
        assert code == 1
        body = stderr_envelope(err)
        assert body["code"] == "ingest_error"
        assert body["detail"][0]["code"] == "MALFORMED_ROW"


class TestFrontEndParity:
    """CLI stdout and HTTP body must be the same bytes (modulo newline)."""

    def test_consensus_parity(self, capsys, store_dir):
        code, out, _ = run(
            capsys,
            "consensus",
            "--store",
            str(store_dir),
            "--dataset",
            "TINY",
            "--threshold",
            "60",
        )
        assert code == 0
        client = TestClient(create_app(Store(store_dir)))
        http = client.get("/datasets/TINY/consensus", params={"threshold": 60})
        assert out.encode() == http.content + b"\n"

    def test_sweep_parity(self, capsys, store_dir):
        code, out, _ = run(
            capsys,
            "sweep",
            "--store",
            str(store_dir),
            "--dataset",
            "TINY",
            "--step",
            "10",
        )
        assert code == 0
        client = TestClient(create_app(Store(store_dir)))
        http = client.get("/datasets/TINY/sweep", params={"step": 10})
        assert out.encode() == http.content + b"\n"

    def test_embedding_parity(self, capsys, store_dir):
        code, out, _ = run(
            capsys,
            "embed",
            "--store",
            str(store_dir),
            "--dataset",
            "TINY",
            "--items",
            "segments",
            "--method",
            "tsne",
            "--perplexity",
            "1.5",
            "--seed",
            "11",
        )
        assert code == 0
        client = TestClient(create_app(Store(store_dir)))
        http = client.get(
            "/datasets/TINY/embedding",
            params={
                "items": "segments",
                "method": "tsne",
                "perplexity": 1.5,
                "seed": 11,
            },
        )
        assert out.encode() == http.content + b"\n"
