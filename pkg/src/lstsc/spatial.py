"""Short-term RTFs, whitening, long-term RTF tracking and LSTSC.

For each TF bin the short-term relative transfer function of microphone m
against the reference is the ratio of cross- to auto-spectral density,
summed over ``R + 1`` frames centred on the current one. Whitening keeps
only its phase. A recursively averaged (and re-whitened) copy tracks the
spatially stationary source, and the long-short-term spatial coherence is
the mean real inner product of the two whitened vectors:

    gamma(l, f) = Re{ r(l, f)^H  rbar(l, f) } / (M - 1)

The coherence at frame l is computed *before* the long-term state absorbs
frame l. Bins whose state has not been seeded yet report gamma = 1.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericError, ShapeError
from .stft import MultichannelSpectrogram

RANGE_TOL = 1e-9


@dataclass(frozen=True)
class RtfConfig:
    """Parameters of the RTF / LSTSC chain.

    ``r_frames`` is the (even) number of neighbouring frames averaged on
    top of the current one; ``lam`` is the forgetting factor of the
    long-term recursion. ``reference_channel`` is 0-based.
    """

    r_frames: int = 4
    lam: float = 0.999
    eps: float = 1e-12
    reference_channel: int = 0

    def __post_init__(self):
        if int(self.r_frames) != self.r_frames or self.r_frames < 0 or self.r_frames % 2:
            raise ConfigError(f"r_frames must be an even non-negative integer, got {self.r_frames!r}")
        if not 0.0 < self.lam < 1.0:
            raise ConfigError(f"forgetting factor must lie in (0, 1), got {self.lam!r}")
        if not self.eps > 0.0:
            raise ConfigError(f"eps must be positive, got {self.eps!r}")
        if int(self.reference_channel) != self.reference_channel or self.reference_channel < 0:
            raise ConfigError(f"invalid reference channel {self.reference_channel!r}")

    def with_lam(self, lam):
        return RtfConfig(self.r_frames, lam, self.eps, self.reference_channel)


GLOBAL = RtfConfig(lam=0.999)
LOCAL = RtfConfig(lam=0.01)


@dataclass
class CoherenceMap:
    """Real coherence values ``gamma`` of shape (T, F) for one forgetting factor."""

    gamma: np.ndarray
    lam: float

    @property
    def n_frames(self):
        return self.gamma.shape[0]

    @property
    def n_bins(self):
        return self.gamma.shape[1]


def _data(spec):
    return spec.data if isinstance(spec, MultichannelSpectrogram) else np.asarray(spec)


def _split_reference(Y, ref):
    if Y.ndim != 3:
        raise ShapeError(f"expected (M, T, F) spectrogram, got shape {Y.shape}")
    n_ch = Y.shape[0]
    if n_ch < 2:
        raise ShapeError(
            "spatial features need at least two microphones (got M = 1); "
            "use the spectral stream only for single-channel input"
        )
    if ref >= n_ch:
        raise ConfigError(f"reference channel {ref} out of range for M = {n_ch}")
    others = [m for m in range(n_ch) if m != ref]
    return Y[ref], Y[others]


def whiten(rtf, eps=RtfConfig.eps):
    """Divide every element by its modulus; elements with modulus < eps become 0."""
    rtf = np.asarray(rtf, dtype=np.complex128)
    mag = np.abs(rtf)
    out = np.zeros_like(rtf)
    ok = mag >= eps
    out[ok] = rtf[ok] / mag[ok]
    return out


def short_term_rtf(spec, l, f, cfg=GLOBAL):
    """Short-term RTF vector (length M-1) at frame ``l`` and bin ``f``.

    The averaging window ``[l - R/2, l + R/2]`` is clamped to valid frames.
    """
    ref, others = _split_reference(_data(spec), cfg.reference_channel)
    n_frames, n_bins = ref.shape
    if not (0 <= l < n_frames and 0 <= f < n_bins):
        raise ShapeError(f"(l={l}, f={f}) outside spectrogram of {n_frames} frames x {n_bins} bins")
    h = cfg.r_frames // 2
    lo, hi = max(0, l - h), min(n_frames, l + h + 1)
    y1 = ref[lo:hi, f]
    cross = np.sum(others[:, lo:hi, f] * np.conj(y1), axis=1)
    auto = np.sum(np.abs(y1) ** 2)
    return cross / max(auto, cfg.eps)


def short_term_rtf_all(spec, cfg=GLOBAL):
    """Short-term RTFs for every frame and bin, shape (M-1, T, F)."""
    ref, others = _split_reference(_data(spec), cfg.reference_channel)
    cross = others * np.conj(ref)
    auto = np.abs(ref) ** 2
    h = cfg.r_frames // 2
    n_frames = ref.shape[0]
    # Zero-padded sliding sums: identical to summing over the clamped window.
    cross_p = np.pad(cross, ((0, 0), (h, h), (0, 0)))
    auto_p = np.pad(auto, ((h, h), (0, 0)))
    cross_sum = sum(cross_p[:, k : k + n_frames] for k in range(2 * h + 1))
    auto_sum = sum(auto_p[k : k + n_frames] for k in range(2 * h + 1))
    return cross_sum / np.maximum(auto_sum, cfg.eps)


def lstsc(r, r_bar, M=None):
    """Coherence between whitened short- and long-term RTF vectors.

    ``r`` and ``r_bar`` have the microphone axis first; trailing axes (e.g.
    bins) are broadcast, so a (M-1, F) pair returns F values.
    """
    r = np.asarray(r)
    r_bar = np.asarray(r_bar)
    if r.shape != r_bar.shape:
        raise ShapeError(f"length mismatch: {r.shape} vs {r_bar.shape}")
    n = r.shape[0]
    if n < 1:
        raise ShapeError("empty RTF vectors")
    if M is not None and M - 1 != n:
        raise ShapeError(f"vectors of length {n} do not match M = {M}")
    gamma = np.real(np.sum(np.conj(r) * r_bar, axis=0)) / n
    if np.any(np.abs(gamma) > 1.0 + RANGE_TOL):
        raise NumericError(
            f"coherence {np.max(np.abs(gamma)):.12g} outside [-1, 1]; are the inputs whitened?"
        )
    gamma = np.clip(gamma, -1.0, 1.0)
    return float(gamma) if gamma.ndim == 0 else gamma


class LstscState:
    """Recursive long-term whitened RTF, one complex value per (mic, bin).

    Single-writer: feed frames strictly in order.
    """

    def __init__(self, n_elements, n_bins, cfg=GLOBAL):
        self.cfg = cfg
        self.long_term = np.zeros((n_elements, n_bins), dtype=np.complex128)
        self.initialized = np.zeros(n_bins, dtype=bool)

    @property
    def shape(self):
        return self.long_term.shape

    def coherence(self, r):
        """gamma for whitened frame ``r`` against the current state (no update)."""
        r = np.asarray(r)
        if r.shape != self.long_term.shape:
            raise ShapeError(f"frame shape {r.shape} does not match state {self.long_term.shape}")
        gamma = lstsc(r, self.long_term)
        return np.where(self.initialized, gamma, 1.0)

    def update(self, r):
        """Absorb whitened frame ``r``; the first frame per bin seeds the state."""
        r = np.asarray(r, dtype=np.complex128)
        if r.shape != self.long_term.shape:
            raise ShapeError(f"frame shape {r.shape} does not match state {self.long_term.shape}")
        lam = self.cfg.lam
        mixed = lam * self.long_term + (1.0 - lam) * r
        mixed[:, ~self.initialized] = r[:, ~self.initialized]
        self.long_term = whiten(mixed, self.cfg.eps)
        self.initialized[:] = True
        return self

    def step(self, r):
        """Coherence of ``r``, then update. Returns gamma for this frame."""
        gamma = self.coherence(r)
        self.update(r)
        return gamma


def coherence_from_whitened(r_white, cfg=GLOBAL, state=None):
    """Run the long-term recursion over whitened RTFs of shape (M-1, T, F)."""
    n_el, n_frames, n_bins = r_white.shape
    if state is None:
        state = LstscState(n_el, n_bins, cfg)
    gamma = np.empty((n_frames, n_bins))
    for l in range(n_frames):
        gamma[l] = state.step(r_white[:, l])
    return CoherenceMap(gamma, state.cfg.lam)


def coherence_stream(spec, cfg=GLOBAL, state=None):
    """LSTSC map (T, F) of a multichannel spectrogram.

    Frames are processed in order: short-term RTF, whitening, coherence
    against the current long-term state, state update. Pass ``state`` to
    continue from a previously adapted state.
    """
    r_white = whiten(short_term_rtf_all(spec, cfg), cfg.eps)
    return coherence_from_whitened(r_white, cfg, state)


class CoherenceTracker:
    """Frame-by-frame LSTSC for live input.

    ``push`` takes one (M, F) STFT frame and returns the coherence vectors
    (possibly none) that became available; each output lags the input by
    ``r_frames // 2`` frames. ``flush`` drains the lookahead at end of
    stream. Outputs match :func:`coherence_stream` on the same frames.
    """

    def __init__(self, n_channels, n_bins, cfgs=(GLOBAL,)):
        cfgs = tuple(cfgs)
        if not cfgs:
            raise ConfigError("need at least one RtfConfig")
        base = cfgs[0]
        for c in cfgs[1:]:
            if (c.r_frames, c.eps, c.reference_channel) != (base.r_frames, base.eps, base.reference_channel):
                raise ConfigError("all configs must share r_frames, eps and reference_channel")
        if n_channels < 2:
            raise ShapeError("spatial features need at least two microphones")
        if base.reference_channel >= n_channels:
            raise ConfigError(f"reference channel {base.reference_channel} out of range")
        self.cfg = base
        self.n_channels = n_channels
        self.n_bins = n_bins
        self.states = [LstscState(n_channels - 1, n_bins, c) for c in cfgs]
        self._half = base.r_frames // 2
        self._buf = deque()  # (cross, auto) per buffered frame
        self._pushed = 0
        self._emitted = 0

    def _emit(self, lo_index):
        # window = buffered frames from absolute index lo_index onward
        start = lo_index - (self._pushed - len(self._buf))
        items = list(self._buf)[start:]
        cross = sum(c for c, _ in items)
        auto = sum(a for _, a in items)
        r = whiten(cross / np.maximum(auto, self.cfg.eps), self.cfg.eps)
        self._emitted += 1
        return tuple(s.step(r) for s in self.states)

    def push(self, frame):
        frame = np.asarray(frame)
        if frame.shape != (self.n_channels, self.n_bins):
            raise ShapeError(f"frame must be ({self.n_channels}, {self.n_bins}), got {frame.shape}")
        ref, others = _split_reference(frame[:, np.newaxis], self.cfg.reference_channel)
        self._buf.append((others[:, 0] * np.conj(ref[0]), np.abs(ref[0]) ** 2))
        self._pushed += 1
        h = self._half
        out = []
        while self._emitted + h < self._pushed:
            l = self._emitted
            out.append(self._emit(max(0, l - h)))
            while len(self._buf) > 2 * h + 1 or (
                self._buf and self._pushed - len(self._buf) < self._emitted - h
            ):
                self._buf.popleft()
        return out

    def flush(self):
        h = self._half
        out = []
        while self._emitted < self._pushed:
            l = self._emitted
            out.append(self._emit(max(0, l - h)))
        self._buf.clear()
        return out
