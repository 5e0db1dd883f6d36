"""Feature-quality evaluation without a trained model.

Oracle target-dominance labels come from the clean stems; the global
ERB-LSTSC is scored as a target detector (low coherence with the
interferer-adapted long-term RTF means target) by ROC AUC, and a binary
coherence mask on the reference channel gives a model-free enhancement
check measured in SI-SNR.
"""

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import rankdata

from .erb import build_filterbank, erb_coherence, erb_power
from .errors import ConfigError, LabelError, ShapeError
from .spatial import GLOBAL, coherence_stream
from .stft import StftConfig, analyze, synthesize

SILENCE_FLOOR_DB = -80.0


@dataclass
class OracleLabels:
    """Per (frame, band) target dominance at the reference mic.

    ``valid`` is False where both target and interference band energies
    sit below the silence floor; those cells are never scored.
    """

    dominance: np.ndarray
    margin_db: np.ndarray
    valid: np.ndarray

    def subset(self, frames):
        return OracleLabels(self.dominance[frames], self.margin_db[frames], self.valid[frames])


@dataclass
class DiscriminationReport:
    auc: float
    band_auc: np.ndarray
    n_positive: int
    n_negative: int
    per_snr: dict = field(default_factory=dict)

    def lines(self):
        out = [f"auc={self.auc:.6f} n_pos={self.n_positive} n_neg={self.n_negative}"]
        for snr in sorted(self.per_snr):
            out.append(f"snr_db={snr:g} auc={self.per_snr[snr]:.6f}")
        for b, a in enumerate(self.band_auc):
            out.append(f"band={b} auc={a:.6f}")
        return out


def oracle_labels(scene, fb=None, cfg=StftConfig(), reference_mic=None,
                  silence_floor_db=SILENCE_FLOOR_DB):
    """Dominance labels from the target stem vs the summed interference stems.

    A cell is target-dominant when the target band energy is strictly
    larger; ``margin_db`` is their ratio in dB.
    """
    target = scene.target
    interf = scene.interference
    if target is None or interf is None:
        raise LabelError("oracle labels need one target stem and at least one interference stem")
    if fb is None:
        fb = build_filterbank(cfg)
    ref = scene.spec.reference_mic if reference_mic is None else reference_mic
    p_t = erb_power(np.abs(analyze(target[ref], cfg).data[0]) ** 2, fb)
    p_i = erb_power(np.abs(analyze(interf[ref], cfg).data[0]) ** 2, fb)
    return labels_from_band_energies(p_t, p_i, silence_floor_db)


def labels_from_band_energies(p_target, p_interf, silence_floor_db=SILENCE_FLOOR_DB):
    p_target = np.asarray(p_target, dtype=float)
    p_interf = np.asarray(p_interf, dtype=float)
    if p_target.shape != p_interf.shape:
        raise ShapeError(f"energy maps differ in shape: {p_target.shape} vs {p_interf.shape}")
    peak = max(p_target.max(initial=0.0), p_interf.max(initial=0.0))
    floor = peak * 10.0 ** (silence_floor_db / 10.0)
    valid = (p_target >= floor) | (p_interf >= floor)
    if peak == 0.0:
        valid[:] = False
    tiny = np.finfo(float).tiny
    with np.errstate(divide="ignore"):
        margin = 10.0 * np.log10(np.maximum(p_target, tiny) / np.maximum(p_interf, tiny))
    margin[(p_target == 0) & (p_interf == 0)] = 0.0
    return OracleLabels(p_target > p_interf, margin, valid)


def auc_score(scores, labels):
    """ROC AUC of ``scores`` for boolean ``labels`` via the rank-sum statistic.

    Ties between a positive and a negative get half credit.
    """
    scores = np.asarray(scores, dtype=float).ravel()
    labels = np.asarray(labels, dtype=bool).ravel()
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise LabelError(
            "need both classes to score: "
            + ("no positive labels" if n_pos == 0 else "no negative labels")
        )
    ranks = rankdata(scores)
    u = ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def score_discrimination(features, labels, snr_db=None):
    """AUC of ``1 - gamma_ERB`` as a detector of target dominance.

    ``features`` is the (T, B) global ERB-LSTSC aligned with ``labels``.
    """
    features = np.asarray(features, dtype=float)
    if features.shape != labels.dominance.shape:
        raise ShapeError(f"features {features.shape} vs labels {labels.dominance.shape}")
    score = 1.0 - features
    v = labels.valid
    auc = auc_score(score[v], labels.dominance[v])
    band_auc = np.full(features.shape[1], np.nan)
    for b in range(features.shape[1]):
        vb = v[:, b]
        y = labels.dominance[vb, b]
        if y.any() and not y.all():
            band_auc[b] = auc_score(score[vb, b], y)
    n_pos = int(labels.dominance[v].sum())
    per_snr = {} if snr_db is None else {float(snr_db): auc}
    return DiscriminationReport(auc, band_auc, n_pos, int(v.sum()) - n_pos, per_snr)


def combine_reports(reports):
    """Pool per-scene reports: the overall AUC is the mean over scenes."""
    reports = list(reports)
    if not reports:
        raise LabelError("no reports to combine")
    per_snr = {}
    for r in reports:
        for snr, a in r.per_snr.items():
            per_snr.setdefault(snr, []).append(a)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # bands with no two-class scene stay NaN
        band = np.nanmean(np.stack([r.band_auc for r in reports]), axis=0)
    return DiscriminationReport(
        float(np.mean([r.auc for r in reports])),
        band,
        sum(r.n_positive for r in reports),
        sum(r.n_negative for r in reports),
        {k: float(np.mean(v)) for k, v in per_snr.items()},
    )


def si_snr(estimate, reference):
    """Scale-invariant SNR in dB (both signals mean-removed)."""
    est = np.asarray(estimate, dtype=float)
    ref = np.asarray(reference, dtype=float)
    if est.shape != ref.shape:
        raise ShapeError(f"signal shapes differ: {est.shape} vs {ref.shape}")
    est = est - est.mean()
    ref = ref - ref.mean()
    energy = np.dot(ref, ref)
    if energy == 0:
        raise LabelError("reference signal is silent")
    proj = np.dot(est, ref) / energy * ref
    noise = est - proj
    p_sig = np.dot(proj, proj)
    if p_sig == 0:
        return -np.inf  # silent or orthogonal estimate
    return float(10.0 * np.log10(p_sig / max(np.dot(noise, noise), 1e-300)))


def scoring_frames(n_frames, cfg, start_sample):
    """Frames that start at or after ``start_sample``."""
    first = -(-start_sample // cfg.hop)
    return np.arange(min(first, n_frames), n_frames)


@dataclass
class EnhanceResult:
    signal: np.ndarray
    mask: np.ndarray
    si_snr_enhanced: float | None = None
    si_snr_unprocessed: float | None = None

    @property
    def gain_db(self):
        if self.si_snr_enhanced is None:
            return None
        return self.si_snr_enhanced - self.si_snr_unprocessed


def coherence_mask_enhance(mixture, coherence, threshold, cfg=StftConfig(), target=None,
                           reference_mic=0, start_sample=0):
    """Binary coherence mask on the reference channel, resynthesized.

    Bins with ``gamma < threshold`` are kept; ``threshold = 1`` keeps
    everything and ``threshold = -1`` nothing. With a ``target`` signal
    (the reference-mic target stem) SI-SNR is reported for the enhanced and
    unprocessed signals over fully overlapped samples from
    ``start_sample`` on.
    """
    if not -1.0 <= threshold <= 1.0:
        raise ConfigError(f"threshold {threshold} outside [-1, 1]")
    mixture = np.atleast_2d(np.asarray(mixture, dtype=float))
    ref = mixture[reference_mic]
    Y = analyze(ref, cfg).data[0]
    gamma = getattr(coherence, "gamma", coherence)
    if gamma.shape != Y.shape:
        raise ShapeError(f"coherence {gamma.shape} not aligned with spectrogram {Y.shape}")
    mask = np.ones_like(gamma, dtype=bool) if threshold >= 1.0 else gamma < threshold
    out = np.zeros_like(ref)
    y = synthesize(Y * mask, cfg)
    out[: len(y)] = y
    result = EnhanceResult(out, mask)
    if target is not None:
        edge = cfg.window_len - cfg.hop
        lo = max(start_sample, edge)
        hi = len(y) - edge
        result.si_snr_enhanced = si_snr(out[lo:hi], target[lo:hi])
        result.si_snr_unprocessed = si_snr(ref[lo:hi], target[lo:hi])
    return result


@dataclass
class SceneEvaluation:
    report: DiscriminationReport
    labels: OracleLabels
    erb_gamma: np.ndarray
    gamma: object
    sweep: list = field(default_factory=list)


def evaluate_scene(scene, cfg=StftConfig(), rtf=GLOBAL, fb=None, n_bands=16,
                   preroll_seconds=None, mask_thresholds=None):
    """Discrimination report (and optional mask sweep) for one labelled scene.

    The long-term state adapts on the interference-only preroll; frames
    from the preroll are excluded from scoring.
    """
    if fb is None:
        fb = build_filterbank(cfg, n_bands)
    if preroll_seconds is None:
        preroll_seconds = scene.spec.preroll_seconds
    start = int(round(preroll_seconds * cfg.sample_rate))
    rtf = replace(rtf, reference_channel=scene.spec.reference_mic)
    spec = analyze(scene.mixture, cfg)
    gamma = coherence_stream(spec, rtf)
    erb_gamma = erb_coherence(gamma.gamma, fb)
    labels = oracle_labels(scene, fb, cfg)
    frames = scoring_frames(spec.n_frames, cfg, start)
    report = score_discrimination(erb_gamma[frames], labels.subset(frames), scene.spec.snr_db)
    sweep = []
    if mask_thresholds is not None:
        ref = scene.spec.reference_mic
        for thr in mask_thresholds:
            res = coherence_mask_enhance(scene.mixture, gamma, float(thr), cfg,
                                         scene.target[ref], ref, start)
            sweep.append((float(thr), res.si_snr_enhanced, res.si_snr_unprocessed, res.gain_db))
    return SceneEvaluation(report, labels, erb_gamma, gamma, sweep)
