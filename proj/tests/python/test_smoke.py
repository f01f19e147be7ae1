"""Smoke tests for the pybind11 module."""

import json
import math

import numpy as np
import pytest

import topicdrift as td


def test_entropy_and_gjs():
    assert td.entropy_kary([0.25, 0.25, 0.25, 0.25]) == pytest.approx(1.0, abs=1e-12)
    assert td.entropy_kary([1.0, 0.0]) == pytest.approx(0.0, abs=1e-12)
    assert td.gjs([[1.0, 0.0], [0.0, 1.0]]) == pytest.approx(1.0, abs=1e-12)
    assert td.gjs([[0.5, 0.5], [0.5, 0.5]]) == 0.0
    h2 = -(0.8 * math.log2(0.8) + 0.2 * math.log2(0.2))
    assert td.gjs([[0.8, 0.2], [0.2, 0.8]]) == pytest.approx(1.0 - h2, abs=1e-9)
    with pytest.raises(td.DataError):
        td.entropy_kary([0.9, 0.3])


def test_threshold_matches_table():
    assert td.chi_square_quantile(1, 0.95) == pytest.approx(3.8415, abs=1e-3)
    threshold = td.significance_threshold(topics=20, time_slices=2, alpha=0.05)
    assert threshold == pytest.approx(30.1435 / (80.0 * math.log(20.0)), abs=1e-3)


def test_nmf_monotone_and_reproducible():
    rng = np.random.default_rng(0)
    x = rng.random((12, 9))
    w, h, trace = td.nmf(x, k=3, iters=80, seed=5)
    assert w.shape == (12, 3)
    assert h.shape == (3, 9)
    assert w.min() >= 0.0 and h.min() >= 0.0
    assert all(b <= a + 1e-9 for a, b in zip(trace, trace[1:]))
    w2, h2, _ = td.nmf(x, k=3, iters=80, seed=5)
    assert np.array_equal(w, w2) and np.array_equal(h, h2)


def test_dnae_train_extract_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    x = rng.random((30, 20)) @ np.diag(np.ones(20))
    config = td.DnaeConfig(hidden_dims=[4], learning_rate=0.05, epochs=50,
                           batch_size=8, seed=3, init_scale=0.1)
    model = td.init_model(config, 20)
    report = model.train(x, config)
    assert len(report.rmse_per_epoch) == 50
    assert model.min_weight() >= 0.0

    u = model.extract_topic_term()
    assert u.shape == (4, 20)
    probs, degenerate = td.normalize_termwise(u)
    assert probs.shape == (4, 20)
    assert np.allclose(probs.sum(axis=0), 1.0, atol=1e-9)

    path = tmp_path / "model.dnae"
    model.save(path)
    loaded = td.DnaeModel.load(path)
    assert np.array_equal(loaded.encoder_weights()[0], model.encoder_weights()[0])
    warm = td.warm_start(loaded, 20, "next")
    assert warm.provenance == "next"
    with pytest.raises(td.DataError):
        td.warm_start(loaded, 19, "next")


def test_gradient_check():
    config = td.DnaeConfig(hidden_dims=[3], seed=11, init_scale=0.5)
    model = td.init_model(config, 6)
    x = np.random.default_rng(2).random((6, 6)) + 0.2
    assert td.gradient_check(model, x, 1e-5) < 1e-4


def test_align_topics_identity():
    u = np.random.default_rng(3).random((4, 10))
    perm, cost = td.align_topics(u, u)
    assert perm == [0, 1, 2, 3]
    assert cost == pytest.approx(0.0, abs=1e-12)
    swapped = u[[1, 0, 2, 3], :]
    perm, _ = td.align_topics(u, swapped)
    assert perm == [1, 0, 2, 3]


def test_diffusion_scores_detect_migration():
    k, m = 4, 6
    base = np.zeros((k, m))
    base[0, :] = 1.0
    moved = np.zeros((k, m))
    moved[2, :] = 1.0
    scores, threshold, support, _ = td.diffusion_scores([base, base, moved], term=0)
    assert scores[0] == 0.0
    assert scores[1] == pytest.approx(math.log(2) / math.log(4), abs=1e-12)
    assert scores[1] > threshold
    assert support == [1, 1, 1]


def test_run_pipeline_smoke(tmp_path):
    docs = []
    for year, topic_word in [(2016, "alpha"), (2017, "alpha"), (2018, "beta")]:
        for d in range(6):
            docs.append({
                "id": f"{year}-{d}",
                "timestamp": f"{year}-06-0{d + 1}",
                "text": f"{topic_word} beat {'gamma' if d % 2 else 'delta'} {topic_word}",
            })
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text("\n".join(json.dumps(d) for d in docs) + "\n")
    (tmp_path / "dict.txt").write_text("alpha\nbeta\ngamma\ndelta\n")
    config = {
        "corpus": str(corpus),
        "dictionary": str(tmp_path / "dict.txt"),
        "slices": [
            {"label": str(y), "start": f"{y}-01-01", "end": f"{y}-12-31"}
            for y in (2016, 2017, 2018)
        ],
        "window": 1,
        "seed": 1,
        "output_dir": str(tmp_path / "out"),
        "dnae": {"hidden_dims": [2], "learning_rate": 0.1, "epochs": 60, "batch_size": 4},
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))
    manifest_path = td.run_pipeline(config_path)
    manifest = json.loads(manifest_path.read_text())
    assert manifest["stages"]["diffuse"]["completed"]
    assert (tmp_path / "out" / "reports" / "diffusion.csv").exists()
