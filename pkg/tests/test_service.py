"""HTTP facade tests: routes, query parsing, error envelopes, persistence.

Every error body must be the canonical envelope {code, message, detail}
and every success body must be canonical JSON (sorted keys, fixed float
formatting) so that repeated identical requests are byte-identical.
"""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from crowdconsensus.payloads import canonical_json
from crowdconsensus.service import create_app
from crowdconsensus.store import Store

MANIFEST = json.dumps(
    {
        "dataset_id": "D1",
        "created_on": "2026-03-01",
        "fov_degrees": 120,
        "flythrough_speed": 2,
        "expected_workers": 2,
    }
).encode()

WORKERS_CSV = b"""worker_id,age_bracket,gender,education_level,medical_expertise,visualization_expertise,reward_tier,location
WA,25-34,female,bachelor,1,3,standard,europe
WB,35-44,male,master,2,2,standard,europe
"""

SEGMENTS_CSV = b"""segment_id,dataset_id,ordinal,direction,orientation,ground_truth
G1,D1,1,ANTEGRADE,SUPINE,POLYP
G2,D1,2,RETROGRADE,SUPINE,POLYP_FREE
"""

RESPONSES_CSV = b"""worker_id,segment_id,answer,response_time_ms,presentation_index,submitted_at
WA,G1,POLYP,1000,1,2026-03-01T10:00:00Z
WA,G2,POLYP_FREE,1200,2,2026-03-01T10:01:00Z
WB,G1,POLYP,900,1,2026-03-01T10:00:30Z
WB,G2,POLYP,1100,2,2026-03-01T10:01:30Z
"""


@pytest.fixture()
def store(tmp_path, tiny_dataset, sim_dataset):
    s = Store(tmp_path / "datasets")
    s.save(tiny_dataset)
    s.save(sim_dataset)
    return s


@pytest.fixture()
def client(store):
    return TestClient(create_app(store))


def get_error(client, url, **kwargs):
    response = client.get(url, **kwargs)
    body = response.json()
    assert set(body) == {"code", "message", "detail"}
    return response.status_code, body


class TestDatasets:
    def test_lists_all_sorted_by_date(self, client):
        body = client.get("/datasets").json()
        ids = [d["id"] for d in body["datasets"]]
        assert ids == ["TINY", "SIMFIX"]

    def test_summary_fields(self, client):
        tiny = client.get("/datasets").json()["datasets"][0]
        assert tiny["created_on"] == "2026-03-01"
        assert tiny["n_segments"] == 4
        assert tiny["n_workers"] == 3
        assert tiny["n_responses"] == 9
        assert tiny["n_comments"] == 2
        assert tiny["has_ground_truth"] is True

    def test_date_window_filters(self, client):
        body = client.get("/datasets", params={"from": "2026-04-01"}).json()
        assert [d["id"] for d in body["datasets"]] == ["SIMFIX"]
        body = client.get("/datasets", params={"to": "2026-03-31"}).json()
        assert [d["id"] for d in body["datasets"]] == ["TINY"]

    def test_reversed_window_is_invalid_range(self, client):
        status, body = get_error(
            client, "/datasets", params={"from": "2026-05-01", "to": "2026-01-01"}
        )
        assert status == 422
        assert body["code"] == "invalid_range"

    def test_garbage_date_is_validation_error(self, client):
        status, body = get_error(client, "/datasets", params={"from": "yesterday"})
        assert status == 422
        assert body["code"] == "validation"

    def test_media_type_is_json(self, client):
        response = client.get("/datasets")
        assert response.headers["content-type"] == "application/json"


class TestConsensus:
    def test_default_threshold_labels(self, client):
        body = client.get("/datasets/TINY/consensus").json()
        assert body["threshold"] == 50.0
        assert body["labels"] == {
            "S1": "polyp",
            "S2": "polyp_free",
            "S3": "polyp_free",
            "S4": "polyp",
        }
        assert body["confusion"] == {"tp": 1, "fp": 0, "tn": 1, "fn": 1}
        assert body["sensitivity"] == 0.5
        assert body["specificity"] == 1.0

    def test_threshold_is_steerable(self, client):
        body = client.get(
            "/datasets/TINY/consensus", params={"threshold": 0}
        ).json()
        assert body["sensitivity"] == 1.0
        assert body["specificity"] == 0.0
        assert body["n_polyp_labels"] == 4

    def test_threshold_out_of_range(self, client):
        status, body = get_error(
            client, "/datasets/TINY/consensus", params={"threshold": 101}
        )
        assert status == 422
        assert body["code"] == "validation"
        assert "threshold" in body["message"]

    def test_non_numeric_threshold_lists_location(self, client):
        status, body = get_error(
            client, "/datasets/TINY/consensus", params={"threshold": "high"}
        )
        assert status == 422
        assert body["code"] == "validation"
        locs = [tuple(item["loc"]) for item in body["detail"]]
        assert ("query", "threshold") in locs

    def test_sort_orders_rows(self, client):
        body = client.get(
            "/datasets/TINY/consensus", params={"sort": "accuracy"}
        ).json()
        assert [r["worker_id"] for r in body["rows"]] == ["W2", "W3", "W1"]

    def test_unknown_sort_rejected(self, client):
        status, body = get_error(
            client, "/datasets/TINY/consensus", params={"sort": "height"}
        )
        assert status == 422
        assert body["code"] == "validation"

    def test_statistics_mode_cells(self, client):
        body = client.get(
            "/datasets/TINY/consensus", params={"mode": "statistics"}
        ).json()
        assert body["mode"] == "statistics"
        elements = {c["element"] for r in body["rows"] for c in r["cells"]}
        assert "correct" in elements

    def test_unknown_mode_rejected(self, client):
        status, body = get_error(
            client, "/datasets/TINY/consensus", params={"mode": "heatmap"}
        )
        assert status == 422

    def test_bad_exclude_token_rejected(self, client):
        status, body = get_error(
            client, "/datasets/TINY/consensus", params={"exclude": "maybe"}
        )
        assert status == 422
        assert body["code"] == "validation"

    def test_unknown_dataset_is_404(self, client):
        status, body = get_error(client, "/datasets/NOPE/consensus")
        assert status == 404
        assert body["code"] == "unknown_dataset"

    def test_repeated_requests_byte_identical(self, client):
        first = client.get("/datasets/TINY/consensus").content
        second = client.get("/datasets/TINY/consensus").content
        assert first == second

    def test_body_is_canonical_json(self, client):
        raw = client.get("/datasets/TINY/consensus").content
        assert raw.decode() == canonical_json(json.loads(raw))

    def test_session_echo(self, client):
        body = client.get(
            "/datasets/TINY/consensus", params={"session": "alice"}
        ).json()
        assert body["exclude"] is False
        assert body["dataset_id"] == "TINY"


class TestSweep:
    def test_default_step(self, client):
        body = client.get("/datasets/TINY/sweep").json()
        assert body["step"] == 5.0
        assert len(body["points"]) == 21
        assert body["points"][0]["threshold"] == 0.0
        assert body["points"][-1]["threshold"] == 100.0

    def test_custom_step(self, client):
        body = client.get("/datasets/TINY/sweep", params={"step": 50}).json()
        assert [p["threshold"] for p in body["points"]] == [0.0, 50.0, 100.0]

    def test_nonpositive_step_rejected(self, client):
        status, body = get_error(
            client, "/datasets/TINY/sweep", params={"step": 0}
        )
        assert status == 422
        assert body["code"] == "validation"


class TestAggregates:
    def test_worker_rows(self, client):
        body = client.get("/datasets/TINY/aggregates").json()
        rows = {r["worker_id"]: r for r in body["workers"]}
        assert rows["W1"]["accuracy"] == pytest.approx(1 / 3)
        assert rows["W2"]["accuracy"] == pytest.approx(2 / 3)
        assert rows["W3"]["total_task_time_ms"] == 2500

    def test_segment_rows(self, client):
        body = client.get("/datasets/TINY/aggregates").json()
        rows = {r["segment_id"]: r for r in body["segments"]}
        assert rows["S1"]["n_polyp_votes"] == 2
        assert rows["S4"]["n_correct"] is None


class TestSimilarWorkers:
    def test_ranked_neighbours(self, client):
        body = client.get(
            "/datasets/TINY/similar-workers", params={"probe": "W1"}
        ).json()
        assert body["worker_id"] == "W1"
        assert body["signature"] == "PNPU"
        assert [hit["worker_id"] for hit in body["similar"]] == ["W2", "W3"]

    def test_probe_is_required(self, client):
        status, body = get_error(client, "/datasets/TINY/similar-workers")
        assert status == 422
        assert body["code"] == "validation"
        locs = [tuple(item["loc"]) for item in body["detail"]]
        assert ("query", "probe") in locs

    def test_unknown_probe_is_404(self, client):
        status, body = get_error(
            client, "/datasets/TINY/similar-workers", params={"probe": "W99"}
        )
        assert status == 404
        assert body["code"] == "unknown_worker"

    def test_negative_k_rejected(self, client):
        status, body = get_error(
            client,
            "/datasets/TINY/similar-workers",
            params={"probe": "W1", "k": -1},
        )
        assert status == 422


class TestAmbiguousSegments:
    def test_ranked_by_ambiguity(self, client):
        body = client.get("/datasets/TINY/ambiguous-segments").json()
        assert [s["segment_id"] for s in body["segments"]] == [
            "S1",
            "S3",
            "S2",
            "S4",
        ]

    def test_min_filter(self, client):
        body = client.get(
            "/datasets/TINY/ambiguous-segments", params={"min": 0.5}
        ).json()
        assert [s["segment_id"] for s in body["segments"]] == ["S1", "S3"]
        assert body["min_ambiguity"] == 0.5

    def test_min_above_one_rejected(self, client):
        status, body = get_error(
            client, "/datasets/TINY/ambiguous-segments", params={"min": 1.5}
        )
        assert status == 422
        assert body["code"] == "validation"


class TestAnomalies:
    def test_suspects_and_groups(self, client):
        body = client.get("/datasets/TINY/anomalies").json()
        suspect_ids = [s["worker_id"] for s in body["suspects"]]
        assert suspect_ids == ["W3"]
        assert body["marked_workers"] == []

    def test_simulated_constant_worker_flagged(self, client):
        body = client.get("/datasets/SIMFIX/anomalies").json()
        flagged = {s["worker_id"]: s["reasons"] for s in body["suspects"]}
        assert "constant_answer" in flagged["W005"]


class TestEmbedding:
    def test_mds_workers(self, client):
        body = client.get(
            "/datasets/TINY/embedding", params={"items": "workers"}
        ).json()
        assert body["method"] == "mds"
        assert {p["id"] for p in body["points"]} == {"W1", "W2", "W3"}
        assert "stress" in body
        assert body["layout_converged"] is True

    def test_tsne_is_seed_deterministic(self, client):
        params = {
            "items": "segments",
            "method": "tsne",
            "perplexity": 1.5,
            "seed": 7,
        }
        first = client.get("/datasets/TINY/embedding", params=params).content
        second = client.get("/datasets/TINY/embedding", params=params).content
        assert first == second
        body = json.loads(first)
        assert body["seed"] == 7
        assert "kl_divergence" in body

    def test_weights_grammar(self, client):
        body = client.get(
            "/datasets/TINY/embedding",
            params={"items": "workers", "weights": "gender:2,location"},
        ).json()
        assert body["weights"] == {"gender": 2.0, "location": 1.0}

    def test_unknown_weight_axis_rejected(self, client):
        status, body = get_error(
            client,
            "/datasets/TINY/embedding",
            params={"items": "workers", "weights": "shoe_size:2"},
        )
        assert status == 422
        assert body["code"] == "unknown_axis"

    def test_malformed_weight_rejected(self, client):
        status, body = get_error(
            client,
            "/datasets/TINY/embedding",
            params={"items": "workers", "weights": "gender:two"},
        )
        assert status == 422
        assert body["code"] == "validation"

    def test_unknown_items_rejected(self, client):
        status, body = get_error(
            client, "/datasets/TINY/embedding", params={"items": "comments"}
        )
        assert status == 422
        assert body["code"] == "unknown_axis"

    def test_radius_resolves_overlaps(self, client):
        body = client.get(
            "/datasets/TINY/embedding",
            params={"items": "workers", "radius": 0.05},
        ).json()
        assert body["radius"] == 0.05
        points = body["points"]
        for i, a in enumerate(points):
            for b in points[i + 1 :]:
                gap = ((a["x"] - b["x"]) ** 2 + (a["y"] - b["y"]) ** 2) ** 0.5
                assert gap >= 0.1 - 1e-6

    def test_bad_perplexity_maps_to_422(self, client):
        status, body = get_error(
            client,
            "/datasets/TINY/embedding",
            params={"items": "workers", "method": "tsne", "perplexity": 9.0},
        )
        assert status == 422
        assert body["code"] == "bad_perplexity"


class TestParallelSets:
    def test_two_axes(self, client):
        body = client.get(
            "/datasets/TINY/parallel-sets",
            params={"axes": "gender,education_level"},
        ).json()
        assert body["axes"] == ["gender", "education_level"]
        assert body["total"] == 3
        roots = {n["category"]: n["count"] for n in body["nodes"]}
        assert roots == {"female": 2, "male": 1}

    def test_axes_whitespace_tolerated(self, client):
        body = client.get(
            "/datasets/TINY/parallel-sets",
            params={"axes": " gender , location "},
        ).json()
        assert body["axes"] == ["gender", "location"]

    def test_unknown_axis_rejected(self, client):
        status, body = get_error(
            client, "/datasets/TINY/parallel-sets", params={"axes": "gender,shoe"}
        )
        assert status == 422
        assert body["code"] == "unknown_axis"

    def test_axes_required(self, client):
        status, body = get_error(client, "/datasets/TINY/parallel-sets")
        assert status == 422
        assert body["code"] == "validation"


class TestWordCloud:
    def test_counts(self, client):
        body = client.get("/datasets/TINY/wordcloud").json()
        words = {w["word"]: w["count"] for w in body["words"]}
        assert words["fast"] == 3
        assert words["video"] == 2

    def test_words_carry_commenting_workers(self, client):
        body = client.get("/datasets/TINY/wordcloud").json()
        commenters = {w["word"]: w["worker_ids"] for w in body["words"]}
        assert commenters["fast"] == ["W1", "W2"]
        assert commenters["difficult"] == ["W2"]

    def test_k_limits(self, client):
        body = client.get("/datasets/TINY/wordcloud", params={"k": 1}).json()
        assert [w["word"] for w in body["words"]] == ["fast"]

    def test_k_below_one_rejected(self, client):
        status, body = get_error(
            client, "/datasets/TINY/wordcloud", params={"k": 0}
        )
        assert status == 422


class TestOverview:
    def test_headline_numbers(self, client):
        body = client.get("/datasets/TINY/overview").json()
        assert body["n_workers"] == 3
        assert body["n_responses"] == 9
        assert body["mean_accuracy"] == pytest.approx((1 / 3 + 2 / 3 + 0.5) / 3)
        assert body["sweep_step"] == 5.0
        assert len(body["sweep"]) == 21


class TestWorkerDetails:
    def test_history_and_neighbours(self, client):
        body = client.get("/datasets/TINY/workers/W1/details").json()
        assert body["profile"]["id"] == "W1"
        assert [h["segment_id"] for h in body["responses"]] == ["S1", "S2", "S3"]
        assert body["aggregate"]["accuracy"] == pytest.approx(1 / 3)
        assert [hit["worker_id"] for hit in body["similar"]] == ["W2", "W3"]

    def test_unknown_worker_is_404(self, client):
        status, body = get_error(client, "/datasets/TINY/workers/W99/details")
        assert status == 404
        assert body["code"] == "unknown_worker"


class TestAnnotations:
    def test_empty_log(self, client):
        body = client.get("/datasets/TINY/annotations").json()
        assert body["annotations"] == []
        assert body["marked_workers"] == []

    def test_post_marks_worker(self, client):
        response = client.post(
            "/datasets/TINY/annotations",
            json={"target": "worker", "target_id": "W3", "note": "too fast"},
        )
        assert response.status_code == 201
        body = response.json()
        assert body["annotation"]["target_id"] == "W3"
        assert body["annotation"]["marked_by"] == "analyst"
        assert body["marked_workers"] == ["W3"]

    def test_mark_persists_across_requests(self, client):
        client.post(
            "/datasets/TINY/annotations",
            json={"target": "segment", "target_id": "S4"},
        )
        body = client.get("/datasets/TINY/annotations").json()
        assert body["marked_segments"] == ["S4"]
        assert body["annotations"][0]["note"] == ""

    def test_mark_survives_store_reload(self, client, store):
        client.post(
            "/datasets/TINY/annotations",
            json={"target": "worker", "target_id": "W2", "marked_by": "bob"},
        )
        reloaded = store.load("TINY")
        assert reloaded.marked_workers() == frozenset({"W2"})
        assert reloaded.annotations[0].marked_by == "bob"

    def test_bad_target_rejected(self, client):
        response = client.post(
            "/datasets/TINY/annotations",
            json={"target": "comment", "target_id": "W1"},
        )
        assert response.status_code == 422
        assert response.json()["code"] == "validation"

    def test_unknown_target_id_rejected(self, client):
        response = client.post(
            "/datasets/TINY/annotations",
            json={"target": "worker", "target_id": "W99"},
        )
        assert response.status_code == 422
        assert "W99" in response.json()["message"]

    def test_missing_body_field_rejected(self, client):
        response = client.post("/datasets/TINY/annotations", json={"target": "worker"})
        assert response.status_code == 422
        assert response.json()["code"] == "validation"

    def test_unknown_dataset_is_404(self, client):
        response = client.post(
            "/datasets/NOPE/annotations",
            json={"target": "worker", "target_id": "W1"},
        )
        assert response.status_code == 404


class TestExclusionFlow:
    """Mark through the API, then steer every view with exclude=on."""

    def mark_w3_and_s4(self, client):
        client.post(
            "/datasets/TINY/annotations",
            json={"target": "worker", "target_id": "W3"},
        )
        client.post(
            "/datasets/TINY/annotations",
            json={"target": "segment", "target_id": "S4"},
        )

    def test_consensus_changes(self, client):
        self.mark_w3_and_s4(client)
        body = client.get(
            "/datasets/TINY/consensus", params={"exclude": "on"}
        ).json()
        assert body["exclude"] is True
        assert body["labels"]["S1"] == "polyp"
        assert body["labels"]["S4"] == "unviewed"
        assert body["unviewed"] == ["S4"]
        assert [r["worker_id"] for r in body["rows"]] == ["W2", "W1"]

    def test_exclude_off_keeps_everyone(self, client):
        self.mark_w3_and_s4(client)
        body = client.get(
            "/datasets/TINY/consensus", params={"exclude": "off"}
        ).json()
        assert len(body["rows"]) == 3
        assert body["labels"]["S4"] == "polyp"
        assert body["unviewed"] == []

    def test_overview_shrinks(self, client):
        self.mark_w3_and_s4(client)
        body = client.get(
            "/datasets/TINY/overview", params={"exclude": "true"}
        ).json()
        assert body["n_workers"] == 2
        assert body["n_responses"] == 6

    def test_wordcloud_drops_marked_workers_comments(self, client):
        client.post(
            "/datasets/TINY/annotations",
            json={"target": "worker", "target_id": "W2"},
        )
        body = client.get(
            "/datasets/TINY/wordcloud", params={"exclude": "1"}
        ).json()
        words = {w["word"]: w["count"] for w in body["words"]}
        assert words["fast"] == 2
        assert "difficult" not in words


class TestIngest:
    def files(self, manifest=MANIFEST, with_comments=False):
        parts = {
            "manifest": ("manifest.json", manifest, "application/json"),
            "responses": ("responses.csv", RESPONSES_CSV, "text/csv"),
            "workers": ("workers.csv", WORKERS_CSV, "text/csv"),
            "segments": ("segments.csv", SEGMENTS_CSV, "text/csv"),
        }
        if with_comments:
            parts["comments"] = (
                "comments.csv",
                b"worker_id,dataset_id,text\nWA,D1,Nice video.\n",
                "text/csv",
            )
        return parts

    def test_upload_creates_dataset(self, client):
        response = client.post("/ingest", files=self.files())
        assert response.status_code == 201
        body = response.json()
        assert body["dataset"]["id"] == "D1"
        assert body["dataset"]["n_responses"] == 4
        assert client.get("/datasets/D1/consensus").status_code == 200

    def test_comments_are_optional_part(self, client):
        response = client.post("/ingest", files=self.files(with_comments=True))
        assert response.status_code == 201
        assert response.json()["dataset"]["n_comments"] == 1

    def test_protocol_warnings_are_nonfatal(self, client):
        # 2 answers per worker against the 20-per-worker protocol: warn, keep.
        response = client.post("/ingest", files=self.files())
        assert response.status_code == 201
        warnings = response.json()["warnings"]
        assert [w["code"] for w in warnings] == ["PROTOCOL_RESPONSE_COUNT"] * 2
        assert "protocol expects 20" in warnings[0]["message"]

    def test_duplicate_id_is_409(self, client):
        assert client.post("/ingest", files=self.files()).status_code == 201
        response = client.post("/ingest", files=self.files())
        assert response.status_code == 409
        assert response.json()["code"] == "duplicate_dataset"

    def test_malformed_rows_are_422_with_diagnostics(self, client):
        bad = RESPONSES_CSV.replace(b"POLYP,1000", b"MAYBE,1000")
        parts = self.files()
        parts["responses"] = ("responses.csv", bad, "text/csv")
        response = client.post("/ingest", files=parts)
        assert response.status_code == 422
        body = response.json()
        assert body["code"] == "ingest_error"
        assert body["detail"][0]["code"] == "MALFORMED_ROW"
        assert body["detail"][0]["row"] == 2

    def test_bad_manifest_is_422(self, client):
        response = client.post("/ingest", files=self.files(manifest=b"{not json"))
        assert response.status_code == 422
        assert "manifest" in response.json()["message"]

    def test_missing_part_is_validation_error(self, client):
        parts = self.files()
        del parts["workers"]
        response = client.post("/ingest", files=parts)
        assert response.status_code == 422
        assert response.json()["code"] == "validation"


class TestAppFactory:
    def test_accepts_path_argument(self, tmp_path, tiny_dataset):
        Store(tmp_path / "d").save(tiny_dataset)
        app = create_app(tmp_path / "d")
        with TestClient(app) as probe:
            ids = [d["id"] for d in probe.get("/datasets").json()["datasets"]]
        assert ids == ["TINY"]
