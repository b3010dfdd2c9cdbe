import hashlib
import io

import numpy as np
import pytest
from fastapi.testclient import TestClient
from PIL import Image

import seqslam.service as service_mod
from seqslam.cli import main
from seqslam.config import parse_config
from seqslam.dataset import write_ground_truth
from seqslam.evaluation import pr_curve
from seqslam.matching import SelectionConfig
from seqslam.service import block_mean, build_session, create_app
from seqslam.synthetic import (
    as_traverse,
    perturb_images,
    smooth_random_images,
    write_traverse_pgm,
)


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("svc")
    rng = np.random.default_rng(777)
    ref_imgs = smooth_random_images(24, 16, 8, rng)
    query_imgs = perturb_images(ref_imgs, rng, noise_sigma=10.0, ramp_amplitude=8.0)
    write_traverse_pgm(root / "reference", as_traverse(ref_imgs, "ref"))
    write_traverse_pgm(root / "query", as_traverse(query_imgs, "query"))
    write_ground_truth(root / "gt.csv", tolerance=1, pairs={q: q for q in range(24)})
    cfg = root / "pipeline.cfg"
    cfg.write_text(
        f"""
dataset.reference_dir = {root / 'reference'}
dataset.query_dir = {root / 'query'}
dataset.ground_truth = {root / 'gt.csv'}
preprocess.target_width = 16
preprocess.target_height = 8
preprocess.patch_size = 4
enhance.r_norm = 8
search.d_s = 4
selection.lambda = 0.0
"""
    )
    return root, cfg


@pytest.fixture(scope="module")
def session(workspace):
    _, cfg = workspace
    return build_session(parse_config(cfg))


@pytest.fixture(scope="module")
def client(session):
    return TestClient(create_app(session), raise_server_exceptions=False)


def artifact_digest(session):
    h = hashlib.sha256()
    h.update(session.result.diff.values.tobytes())
    h.update(session.result.enhanced.values.tobytes())
    h.update(session.result.scores.scores.tobytes())
    h.update(session.result.scores.valid.tobytes())
    for p in session.result.proposals:
        h.update(f"{p.query}:{p.reference}:{p.score}".encode())
    return h.hexdigest()


# ---------------------------------------------------------------- block mean


def block_mean_oracle(values, k):
    n, m = values.shape
    out = np.zeros((-(-n // k), -(-m // k)))
    for bi in range(out.shape[0]):
        for bj in range(out.shape[1]):
            block = values[bi * k : (bi + 1) * k, bj * k : (bj + 1) * k]
            out[bi, bj] = block.mean()
    return out


def test_block_mean_matches_oracle(rng):
    for n, m, k in [(4, 4, 2), (7, 5, 2), (9, 9, 4), (6, 8, 3), (5, 5, 10)]:
        values = rng.normal(size=(n, m))
        assert np.allclose(block_mean(values, k), block_mean_oracle(values, k), atol=1e-9)


# ---------------------------------------------------------------- endpoints


def test_session_endpoint(client, session):
    body = client.get("/api/session").json()
    assert body["id"] == session.id
    assert body["n"] == 24 and body["m"] == 24
    assert body["orientation"] == "lower_is_better"
    assert body["has_ground_truth"] is True
    assert body["methods_computed"] == ["trajectory"]
    assert body["selection"]["method"] == "score_threshold"


def test_unknown_session_token(client):
    resp = client.get("/api/session", params={"token": "nope"})
    assert resp.status_code == 404
    assert resp.json()["error"] == "unknown_session"


def test_matrix_raw_passthrough(client, session):
    body = client.get("/api/matrix", params={"kind": "raw", "downsample": 1}).json()
    values = np.array(body["values"]).reshape(body["n"], body["m"])
    assert np.allclose(values, session.result.diff.values, atol=1e-12)


def test_matrix_downsample_block_means(client, session):
    body = client.get("/api/matrix", params={"kind": "enhanced", "downsample": 2}).json()
    got = np.array(body["values"]).reshape(body["n"], body["m"])
    want = block_mean_oracle(session.result.enhanced.values, 2)
    assert np.allclose(got, want, atol=1e-9)


def test_matrix_scores_includes_orientation_and_mask(client):
    body = client.get("/api/matrix", params={"kind": "scores"}).json()
    assert body["orientation"] == "lower_is_better"
    assert set(body["valid"]) <= {0, 1}


def test_matrix_method_not_computed(client):
    resp = client.get("/api/matrix", params={"kind": "scores", "method": "cone"})
    assert resp.status_code == 409
    assert resp.json()["error"] == "not_computed"


def test_matrix_unknown_kind(client):
    resp = client.get("/api/matrix", params={"kind": "sparkly"})
    assert resp.status_code == 400
    assert resp.json()["error"] == "invalid_request"


def test_matrix_payload_cap(client, monkeypatch):
    monkeypatch.setattr(service_mod, "MAX_PAYLOAD_CELLS", 10)
    resp = client.get("/api/matrix", params={"kind": "raw"})
    assert resp.status_code == 413
    assert resp.json()["error"] == "payload_too_large"


def test_reselect_deterministic(client):
    a = client.post("/api/reselect", json={"lambda": 0.3}).json()
    b = client.post("/api/reselect", json={"lambda": 0.3}).json()
    assert a == b


def test_reselect_loosening_superset(client):
    tight = client.post("/api/reselect", json={"lambda": 0.7}).json()
    loose = client.post("/api/reselect", json={"lambda": 0.1}).json()
    kept_tight = {m["query"] for m in tight["matches"] if m["accepted"]}
    kept_loose = {m["query"] for m in loose["matches"] if m["accepted"]}
    assert kept_tight <= kept_loose


def test_reselect_never_mutates_artifacts(client, session):
    before = artifact_digest(session)
    client.post("/api/reselect", json={"lambda": 0.5}).json()
    client.post("/api/reselect", json={"method": "windowed_uniqueness", "mu": 1.1}).json()
    assert artifact_digest(session) == before


def test_reselect_invalid_selection(client):
    resp = client.post("/api/reselect", json={"mu": 0.2, "method": "windowed_uniqueness"})
    assert resp.status_code == 400
    assert resp.json()["error"] == "invalid_selection"


def test_reselect_updates_session_state(client, session):
    client.post("/api/reselect", json={"method": "score_threshold", "lambda": 0.42})
    assert session.selection.lam == 0.42
    body = client.get("/api/session").json()
    assert body["selection"]["lambda"] == 0.42


def test_reselect_matches_cli_run(workspace, session, client, tmp_path):
    """Cross-path consistency: service reselect equals an end-to-end CLI run."""
    root, cfg = workspace
    tau = 0.35
    cfg_tau = tmp_path / "tau.cfg"
    cfg_tau.write_text(cfg.read_text().replace("selection.lambda = 0.0", f"selection.lambda = {tau}"))
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg_tau), "--out", str(out)]) == 0
    header, row = (out / "metrics.csv").read_text().strip().split("\n")
    cli_metrics = dict(zip(header.split(","), row.split(",")))
    body = client.post("/api/reselect", json={"method": "score_threshold", "lambda": tau}).json()
    assert round(body["metrics"]["precision"], 4) == round(float(cli_metrics["precision"]), 4)
    assert round(body["metrics"]["recall"], 4) == round(float(cli_metrics["recall"]), 4)
    assert round(body["metrics"]["f1"], 4) == round(float(cli_metrics["f1"]), 4)
    # byte-for-byte the same floats, in fact
    assert body["metrics"]["precision"] == float(cli_metrics["precision"])


def test_pr_curve_endpoint(client, session):
    body = client.get("/api/pr-curve", params={"method": "score_threshold"}).json()
    want = pr_curve(
        session.result.proposals,
        session.result.scores,
        session.result.gt,
        SelectionConfig(method="score_threshold"),
    )
    assert body["method"] == "score_threshold"
    assert len(body["points"]) == len(want.points)
    assert body["points"][0]["threshold"] == want.points[0].threshold
    assert body["points"][-1]["recall"] == 0.0


def test_match_detail_accepted_and_trajectory(client, session):
    client.post("/api/reselect", json={"method": "score_threshold", "lambda": 0.0})
    accepted = [p for p, k in zip(session.matches.proposals, session.matches.accepted) if k]
    assert accepted, "fixture should accept something at lambda=0"
    q = accepted[0].query
    body = client.get(f"/api/match/{q}").json()
    assert body["proposal"]["accepted"] is True
    cells = body["trajectory"]
    assert len(cells) == session.config.search.d_s
    total = sum(c["value"] for c in cells)
    assert total == pytest.approx(body["proposal"]["score"], abs=1e-9)


def test_match_detail_no_proposal(client, session):
    # query 0 sits inside the sequence margin: its column is fully invalid
    assert not session.result.scores.valid[:, 0].any()
    body = client.get("/api/match/0").json()
    assert body["proposal"] is None
    assert body["trajectory"] == []
    assert body["context"]["reference_indices"] == []


def test_match_detail_out_of_range(client):
    resp = client.get("/api/match/999")
    assert resp.status_code == 404
    assert resp.json()["error"] == "query_out_of_range"


def test_match_detail_context_indices(client):
    body = client.get("/api/match/5", params={"context": 2}).json()
    assert body["context"]["query_indices"] == [3, 4, 5, 6, 7]


def test_image_endpoint_png(client, session):
    resp = client.get("/api/image", params={"traverse": "reference", "index": 3})
    assert resp.status_code == 200
    assert resp.headers["content-type"] == "image/png"
    img = Image.open(io.BytesIO(resp.content))
    want = session.result.ref_raw.images[3]
    assert img.size == (want.shape[1], want.shape[0])
    got = np.asarray(img, dtype=np.float64)
    assert np.abs(got - want).max() <= 0.5  # 8-bit quantization only


def test_image_endpoint_bad_traverse(client):
    resp = client.get("/api/image", params={"traverse": "sideways", "index": 0})
    assert resp.status_code == 400


def test_image_endpoint_out_of_range(client):
    resp = client.get("/api/image", params={"traverse": "query", "index": 999})
    assert resp.status_code == 404
