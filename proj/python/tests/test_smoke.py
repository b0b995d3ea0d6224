import math

import numpy as np
import pytest

import lddisc


def test_metrics():
    assert lddisc.smooth([1.0, 0.0], 0.03) == [0.97, 0.03]
    p = lddisc.smooth([1.0, 0.0])
    expected = 0.97 * math.log(1.94) + 0.03 * math.log(0.06)
    assert lddisc.kl_divergence(p, [0.5, 0.5]) == pytest.approx(expected, abs=1e-12)
    assert lddisc.kl_divergence(p, p) == 0.0


def test_pipeline(tmp_path):
    corpus = lddisc.synthesize_gaussian(num_sources=3, segments_per_source=8, frames_per_segment=60, seed=4)
    assert len(corpus) == 24
    train, test = lddisc.split(corpus, 0.75, 4)
    assert len(train) + len(test) == 24

    cb = lddisc.train_codebook(train, size=32)
    assert cb.means.shape == (32, 13)
    frame = train.segments[0].frames[0]
    q = lddisc.quantize_corpus(train, cb)
    assert q.segments[0].words[0] == lddisc.quantize_frame(frame, cb)

    res = lddisc.train_lda(q, num_domains=3, seed=1)
    trace = res.elbo_trace
    assert all(b >= a - 1e-8 * abs(a) for a, b in zip(trace, trace[1:]))
    beta = res.model.beta
    assert np.allclose(beta.sum(axis=0), 1.0)

    gamma = lddisc.infer(lddisc.quantize_corpus(test, cb), res.model)
    assert gamma.shape == (len(test), 3)
    domains = lddisc.assign_domains(gamma)
    assert domains == [int(np.argmax(row)) for row in gamma]

    path = tmp_path / "model.ldam"
    lddisc.write_model(res.model, path)
    assert np.array_equal(lddisc.read_model(path).beta, beta)


def test_feature_corpus_from_numpy(tmp_path):
    c = lddisc.FeatureCorpus()
    c.add_segment("a", "L", np.arange(6, dtype=np.float32).reshape(3, 2))
    c.add_segment("b", None, np.ones((2, 2)))
    path = tmp_path / "f.ldfc"
    lddisc.write_features(c, path, text=True)
    back = lddisc.read_features(path)
    assert back.total_frames() == 5
    assert back.segments[1].label is None
    with pytest.raises(lddisc.InputError):
        c.add_segment("c", None, np.ones((2, 3)))


def test_cli(tmp_path):
    assert lddisc.run_cli(["synth", "--print-config"]) == 0
    assert lddisc.run_cli(["no-such-command"]) == 1
    assert lddisc.run_cli(["quantize", "--features", str(tmp_path / "none"), "--codebook", "x",
                           "--out", str(tmp_path)]) == 4
