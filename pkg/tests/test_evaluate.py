import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lstsc.errors import ConfigError, LabelError, ShapeError
from lstsc.evaluate import (
    OracleLabels,
    auc_score,
    coherence_mask_enhance,
    combine_reports,
    evaluate_scene,
    labels_from_band_energies,
    oracle_labels,
    score_discrimination,
    scoring_frames,
    si_snr,
)
from lstsc.scene import SceneSpec, Source, polar_position, render_scene, speech_like, uca, white_noise
from lstsc.spatial import coherence_stream
from lstsc.stft import StftConfig, analyze

from reference import pairwise_auc

FS = 16000


def small_scene(snr=5.0, target=True, interferer=True, scale=1.0):
    g = uca(3)
    srcs = []
    if target:
        srcs.append(Source(polar_position(g.center, 0, 1.0), scale * speech_like(16000, FS, 11), "target", "target"))
    if interferer:
        srcs.append(Source(polar_position(g.center, 120, 1.5), scale * white_noise(24000, 23),
                           "interference", "interference"))
    return render_scene(SceneSpec(g, srcs, snr_db=snr, preroll_seconds=0.5))


class TestAuc:
    def test_perfect_and_inverted(self):
        assert auc_score([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0
        assert auc_score([0.9, 0.8, 0.2, 0.1], [0, 0, 1, 1]) == 0.0
        assert auc_score([0.5, 0.5, 0.5], [0, 1, 1]) == 0.5

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.integers(2, 80))
    def test_matches_pairwise_oracle(self, seed, n):
        rng = np.random.default_rng(seed)
        scores = rng.integers(0, 6, n).astype(float)  # many ties
        labels = rng.random(n) < 0.4
        labels[0], labels[1] = True, False
        assert auc_score(scores, labels) == pytest.approx(pairwise_auc(scores, labels), abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31 - 1))
    def test_monotone_transform_invariance(self, seed):
        rng = np.random.default_rng(seed)
        s = rng.standard_normal(200)
        y = rng.random(200) < 0.5
        y[:2] = [True, False]
        base = auc_score(s, y)
        for fn in (np.exp, lambda v: 3 * v - 7, lambda v: v**3, np.arctan):
            assert auc_score(fn(s), y) == pytest.approx(base, abs=1e-12)

    def test_uninformative_scores_are_near_chance(self):
        rng = np.random.default_rng(0)
        a = auc_score(rng.random(20000), rng.random(20000) < 0.5)
        assert abs(a - 0.5) < 0.02

    def test_degenerate_classes(self):
        with pytest.raises(LabelError, match="no negative"):
            auc_score([1.0, 2.0], [1, 1])
        with pytest.raises(LabelError, match="no positive"):
            auc_score([1.0, 2.0], [0, 0])


def test_labels_from_energies():
    pt = np.array([[2.0, 1.0, 0.0], [1.0, 1e-12, 0.0]])
    pi = np.array([[1.0, 1.0, 0.0], [3.0, 1e-12, 0.0]])
    lab = labels_from_band_energies(pt, pi)
    np.testing.assert_array_equal(lab.dominance, [[True, False, False], [False, False, False]])
    np.testing.assert_array_equal(lab.valid, [[True, True, False], [True, False, False]])
    assert lab.margin_db[0, 0] == pytest.approx(10 * np.log10(2))
    with pytest.raises(ShapeError):
        labels_from_band_energies(pt, pi[:1])


def test_score_discrimination_brute_force():
    rng = np.random.default_rng(1)
    g = rng.uniform(-1, 1, (30, 16))
    dom = rng.random((30, 16)) < 0.3
    valid = rng.random((30, 16)) < 0.9
    lab = OracleLabels(dom, np.zeros((30, 16)), valid)
    rep = score_discrimination(g, lab, 5.0)
    assert rep.auc == pytest.approx(pairwise_auc(1 - g[valid], dom[valid]), abs=1e-12)
    assert rep.n_positive == int(dom[valid].sum())
    assert rep.per_snr == {5.0: rep.auc}
    assert rep.lines()[0].startswith("auc=")
    with pytest.raises(ShapeError):
        score_discrimination(g[:, :3], lab)
    combined = combine_reports([rep, score_discrimination(g, lab, 0.0)])
    assert set(combined.per_snr) == {0.0, 5.0}


def test_oracle_labels_need_stems():
    with pytest.raises(LabelError):
        oracle_labels(small_scene(interferer=False))


def test_scale_invariance_end_to_end():
    a = evaluate_scene(small_scene())
    b = evaluate_scene(small_scene(scale=37.0))
    np.testing.assert_array_equal(a.labels.dominance, b.labels.dominance)
    np.testing.assert_allclose(a.erb_gamma, b.erb_gamma, atol=1e-9)
    assert a.report.auc == pytest.approx(b.report.auc, abs=1e-6)


def test_preroll_frames_are_not_scored():
    cfg = StftConfig()
    frames = scoring_frames(100, cfg, 8000)
    assert frames[0] == 32 and frames[0] * cfg.hop >= 8000
    ev = evaluate_scene(small_scene())
    assert ev.report.n_positive + ev.report.n_negative <= (ev.erb_gamma.shape[0] - 32) * 16


def test_target_only_scene_has_no_negatives():
    scene = small_scene(interferer=False)
    with pytest.raises(LabelError):
        evaluate_scene(scene)


class TestMask:
    def setup_method(self):
        self.scene = small_scene(0.0)
        self.gamma = coherence_stream(analyze(self.scene.mixture))

    def test_all_pass_returns_reference(self):
        res = coherence_mask_enhance(self.scene.mixture, self.gamma, 1.0)
        ref = self.scene.mixture[0]
        edge = 256
        n = len(ref) - (len(ref) - 512) % 256
        np.testing.assert_allclose(res.signal[edge : n - edge], ref[edge : n - edge], atol=1e-9)
        assert res.mask.all()

    def test_all_reject_is_silent(self):
        res = coherence_mask_enhance(self.scene.mixture, self.gamma, -1.0)
        assert not res.signal.any() and not res.mask.any()

    def test_gain_report(self):
        res = coherence_mask_enhance(self.scene.mixture, self.gamma, 0.9, target=self.scene.target[0],
                                     start_sample=self.scene.spec.preroll_samples)
        assert res.gain_db == res.si_snr_enhanced - res.si_snr_unprocessed
        T = self.gamma.gamma.shape[0]
        hi = (T - 1) * 256 + 512 - 256
        lo = self.scene.spec.preroll_samples
        ref, tgt = self.scene.mixture[0], self.scene.target[0]
        assert res.si_snr_unprocessed == si_snr(ref[lo:hi], tgt[lo:hi])
        assert res.si_snr_enhanced == si_snr(res.signal[lo:hi], tgt[lo:hi])

    def test_errors(self):
        with pytest.raises(ConfigError):
            coherence_mask_enhance(self.scene.mixture, self.gamma, 1.5)
        with pytest.raises(ShapeError):
            coherence_mask_enhance(self.scene.mixture, self.gamma.gamma[:-1], 0.5)


def test_si_snr():
    rng = np.random.default_rng(2)
    s = rng.standard_normal(1000)
    n = rng.standard_normal(1000)
    n -= n.mean()
    s -= s.mean()
    n -= np.dot(n, s) / np.dot(s, s) * s
    n *= np.sqrt(np.dot(s, s) / np.dot(n, n)) / np.sqrt(10)
    assert si_snr(s + n, s) == pytest.approx(10.0, abs=1e-9)
    assert si_snr(5 * (s + n), s) == pytest.approx(10.0, abs=1e-9)
    assert si_snr(np.zeros(1000), s) == -np.inf
    with pytest.raises(LabelError):
        si_snr(s, np.zeros(1000))
