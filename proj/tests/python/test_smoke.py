"""Smoke tests for the fragsel Python module and CLI."""

import http.server
import json
import math
import os
import subprocess
import threading

import pytest

fragsel = pytest.importorskip("fragsel")

DEMO = os.environ.get("FRAGSEL_DEMO", "data/demo")
CLI = os.environ.get("FRAGSEL_CLI")


def test_count_tokens():
    assert fragsel.count_tokens("") == 0
    assert fragsel.count_tokens("a  b\tc") == 3
    assert fragsel.count_tokens("Nobel Peace Prize 2019") == 4


def test_fig_score_and_hard_label():
    fig = fragsel.fig_score(["a", "b"], [-0.1, -0.3], [-1.2, -0.8])
    assert fig == pytest.approx(0.8, abs=1e-12)
    assert fragsel.hard_label(fig, 0.2) == 1
    assert fragsel.hard_label(0.2, 0.2) == 0


def test_losses_match_reference_values():
    assert fragsel.sigmoid(0.0) == 0.5
    assert fragsel.sigmoid(2.0) == pytest.approx(0.8807970779778823, abs=1e-15)
    assert fragsel.bce_loss([1, 0], [0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-12)
    assert fragsel.kd_loss([1], [0.0], [2.0], 0.5, 1.0) == pytest.approx(0.5104802530163414, abs=1e-12)
    # alpha=0 degenerates to BCE
    logits = [0.3, -1.2, 2.0]
    labels = [1, 0, 1]
    probs = [fragsel.sigmoid(x) for x in logits]
    assert fragsel.kd_loss(labels, logits, [0.0] * 3, 0.0, 2.0) == pytest.approx(
        fragsel.bce_loss(labels, probs), abs=1e-12
    )


def test_kd_grad_matches_finite_differences():
    labels, student, teacher = [1, 0], [0.5, -0.25], [2.0, -1.0]
    grad = fragsel.kd_grad(labels, student, teacher, 0.7, 2.0)
    h = 1e-5
    for i in range(2):
        plus = list(student)
        minus = list(student)
        plus[i] += h
        minus[i] -= h
        fd = (
            fragsel.kd_loss(labels, plus, teacher, 0.7, 2.0)
            - fragsel.kd_loss(labels, minus, teacher, 0.7, 2.0)
        ) / (2 * h)
        assert grad[i] == pytest.approx(fd, abs=1e-8)


def test_filter_boxes_strict_boundaries():
    thresholds = fragsel.VisualFilterThresholds(0.40, 0.35, 2500.0)
    passing = fragsel.DetectionCandidate(fragsel.BoundingBox(0, 0, 60, 50), 0.50, 0.40)
    boundary = fragsel.DetectionCandidate(fragsel.BoundingBox(0, 0, 100, 100), 0.40, 0.90)
    kept = fragsel.filter_boxes([passing, boundary], thresholds)
    assert len(kept) == 1
    assert kept[0].objectness == 0.50
    assert fragsel.box_area(fragsel.BoundingBox(0, 0, 50, 50)) == 2500.0


def test_recur_split_with_python_scorer():
    doc = fragsel.Document.text("d", "Aaaa aaa. Bbbb bbb. Cccc ccc. Dddd ddd.")
    query = fragsel.Query("q", "find c")
    table = {
        "Aaaa aaa. Bbbb bbb. Cccc ccc. Dddd ddd.": 0.5,
        "Aaaa aaa. Bbbb bbb.": 0.3,
        "Cccc ccc. Dddd ddd.": 0.7,
        "Cccc ccc.": 0.9,
        "Dddd ddd.": 0.4,
    }
    fragment, trace = fragsel.recur_split(query, doc, lambda q, text: table[text])
    assert fragment.text == "Cccc ccc."
    assert fragment.relevance_score == 0.9
    assert (trace.result_span.start, trace.result_span.end) == (2, 2)
    assert len(trace.visited) == 3


def test_extract_features_dimension():
    query = fragsel.Query("q", "nobel peace prize")
    item = fragsel.EvidenceItem.from_json(
        json.dumps(
            {
                "kind": "text_frag",
                "payload": {
                    "parent_doc_id": "d",
                    "span": [0, 0],
                    "text": "nobel peace prize",
                    "relevance_score": 0.5,
                },
            }
        )
    )
    features = fragsel.extract_features(query, item)
    assert len(features) == fragsel.BASELINE_FEATURE_DIM
    assert features[0] == 1.0


def test_run_with_fixtures_reproduces_demo():
    query = fragsel.Query("q1", "Who won the Nobel Peace Prize in 2019?")
    config = fragsel.Config()
    config.n_ret = 5
    config.n_seg = 3
    config.k = 5
    config.image_token_cost = 32
    answer, report_json = fragsel.run_with_fixtures(
        query,
        config,
        os.path.join(DEMO, "fixtures"),
        os.path.join(DEMO, "corpus.jsonl"),
        os.path.join(DEMO, "model.json"),
    )
    assert answer == "Abiy Ahmed Ali won the 2019 Nobel Peace Prize."
    report = json.loads(report_json)
    assert report["context_tokens"] == 134
    assert report["pool_sizes"]["hybrid_pool"] == 6
    kinds = [item["kind"] for item in report["selected_items"]]
    assert kinds == ["text_frag", "text_frag", "visual_frag", "original_image", "coarse_doc"]


def test_bucket_fig():
    assert fragsel.bucket_fig([-0.1, 0.1, 0.5], [0.0, 0.2]) == [1, 1, 1]
    assert fragsel.bucket_fig([0.2], [0.0, 0.2]) == [0, 1, 0]


def test_errors_surface_as_python_exceptions():
    with pytest.raises(Exception) as excinfo:
        fragsel.fig_score(["a"], [-0.1], [-0.1, -0.2])
    assert "logprobs" in str(excinfo.value) or "length" in str(excinfo.value).lower()


@pytest.mark.skipif(CLI is None, reason="FRAGSEL_CLI not set")
class TestCli:
    def test_exit_code_usage(self):
        proc = subprocess.run([CLI, "segment-text"], capture_output=True, text=True)
        assert proc.returncode == 2
        assert proc.stderr.startswith("error:USAGE")

    def test_exit_code_backend_failure(self, tmp_path):
        query = tmp_path / "q.json"
        query.write_text(json.dumps({"id": "qX", "text": "unknown query"}))
        doc = tmp_path / "d.json"
        doc.write_text(json.dumps({"id": "d", "modality": "text", "body": "One. Two."}))
        proc = subprocess.run(
            [
                CLI,
                "segment-text",
                "--query",
                str(query),
                "--doc",
                str(doc),
                "--scores",
                os.path.join(DEMO, "fixtures", "scorer.json"),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 3
        assert proc.stderr.startswith("error:FIXTURE_MISS")

    def test_exit_code_data_error(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("unknown_key = 1\n")
        proc = subprocess.run(
            [
                CLI,
                "--config",
                str(bad),
                "run",
                "--corpus",
                os.path.join(DEMO, "corpus.jsonl"),
                "--queries",
                os.path.join(DEMO, "queries.jsonl"),
                "--model",
                os.path.join(DEMO, "model.json"),
                "--backends",
                os.path.join(DEMO, "fixtures"),
                "--out",
                str(tmp_path / "out.jsonl"),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 4
        assert proc.stderr.startswith("error:CONFIG_ERROR")

    def test_segment_text_against_http_endpoint(self, tmp_path):
        class ScoreHandler(http.server.BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers["Content-Length"])
                body = json.loads(self.rfile.read(length))
                assert self.path == "/score"
                assert body["v"] == 1
                payload = json.dumps({"score": 0.625}).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

            def log_message(self, *args):
                pass

        server = http.server.HTTPServer(("127.0.0.1", 0), ScoreHandler)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            query = tmp_path / "q.json"
            query.write_text(json.dumps({"id": "q", "text": "anything"}))
            doc = tmp_path / "d.json"
            doc.write_text(json.dumps({"id": "d", "modality": "text", "body": "One sentence only."}))
            proc = subprocess.run(
                [
                    CLI,
                    "segment-text",
                    "--query",
                    str(query),
                    "--doc",
                    str(doc),
                    "--scores",
                    f"http://127.0.0.1:{server.server_address[1]}",
                ],
                capture_output=True,
                text=True,
            )
            assert proc.returncode == 0, proc.stderr
            out = json.loads(proc.stdout)
            assert out["fragment"]["text"] == "One sentence only."
            assert out["fragment"]["relevance_score"] == 0.625
        finally:
            server.shutdown()
            thread.join()

    def test_demo_run_end_to_end(self, tmp_path):
        out = tmp_path / "results.jsonl"
        proc = subprocess.run(
            [
                CLI,
                "--config",
                os.path.join(DEMO, "config.cfg"),
                "run",
                "--corpus",
                os.path.join(DEMO, "corpus.jsonl"),
                "--queries",
                os.path.join(DEMO, "queries.jsonl"),
                "--model",
                os.path.join(DEMO, "model.json"),
                "--backends",
                os.path.join(DEMO, "fixtures"),
                "--out",
                str(out),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        lines = [json.loads(line) for line in out.read_text().splitlines()]
        assert "header" in lines[0]
        assert lines[1]["answer"] == "Abiy Ahmed Ali won the 2019 Nobel Peace Prize."
        assert lines[1]["report"]["context_tokens"] == 134

    def test_truncation_baseline_run(self, tmp_path):
        out = tmp_path / "baseline.jsonl"
        proc = subprocess.run(
            [
                CLI,
                "--config",
                os.path.join(DEMO, "config.cfg"),
                "run",
                "--corpus",
                os.path.join(DEMO, "corpus.jsonl"),
                "--queries",
                os.path.join(DEMO, "queries.jsonl"),
                "--backends",
                os.path.join(DEMO, "fixtures"),
                "--baseline",
                "truncate",
                "--budget",
                "134",
                "--out",
                str(out),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        lines = [json.loads(line) for line in out.read_text().splitlines()]
        assert lines[0]["header"]["config"]["baseline"] == "truncate"
        report = lines[1]["report"]
        assert report["context_tokens"] <= 134
        items = report["selected_items"]
        # budget-matched prefix: d1 whole, the image whole, d2 cut mid-document
        assert [it["payload"]["id"] for it in items] == ["d1", "d3", "d2"]
        assert all(it["kind"] == "coarse_doc" for it in items)
        assert items[2]["payload"]["token_count"] == 17
