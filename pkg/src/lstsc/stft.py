"""STFT analysis and overlap-add synthesis.

Shape convention: multichannel spectrograms are ``(M, T, F)`` (channel,
frame, bin); time signals are ``(M, N)``. All spectral math runs in
float64 / complex128.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ShapeError

WINDOW_KINDS = ("hann", "rect")


def make_window(kind, length):
    """Periodic analysis window of ``length`` samples."""
    if kind == "hann":
        n = np.arange(length)
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * n / length)
    if kind == "rect":
        return np.ones(length)
    raise ConfigError(f"unknown window kind {kind!r}; expected one of {WINDOW_KINDS}")


@dataclass(frozen=True)
class StftConfig:
    """STFT parameters. Defaults: 16 kHz, 32 ms window, 16 ms hop, 512-point FFT."""

    sample_rate: int = 16000
    window_len: int = 512
    hop: int = 256
    fft_len: int = 512
    window_kind: str = "hann"

    def __post_init__(self):
        for name in ("sample_rate", "window_len", "hop", "fft_len"):
            value = getattr(self, name)
            if int(value) != value or value <= 0:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.hop > self.window_len:
            raise ConfigError(f"hop ({self.hop}) exceeds window_len ({self.window_len})")
        if self.window_len > self.fft_len:
            raise ConfigError(f"window_len ({self.window_len}) exceeds fft_len ({self.fft_len})")
        if self.fft_len & (self.fft_len - 1):
            raise ConfigError(f"fft_len must be a power of two, got {self.fft_len}")
        if self.window_kind not in WINDOW_KINDS:
            raise ConfigError(f"unknown window kind {self.window_kind!r}")

    @property
    def n_bins(self):
        return self.fft_len // 2 + 1

    @property
    def window(self):
        return make_window(self.window_kind, self.window_len)

    def n_frames(self, n_samples):
        if n_samples < self.window_len:
            return 0
        return (n_samples - self.window_len) // self.hop + 1

    def bin_frequencies(self):
        return np.arange(self.n_bins) * self.sample_rate / self.fft_len

    def to_dict(self):
        return {
            "sample_rate": self.sample_rate,
            "window_len": self.window_len,
            "hop": self.hop,
            "fft_len": self.fft_len,
            "window_kind": self.window_kind,
        }


@dataclass
class MultichannelSpectrogram:
    """Complex STFT of an M-channel signal, ``data`` has shape (M, T, F)."""

    data: np.ndarray
    config: StftConfig = field(default_factory=StftConfig)

    def __post_init__(self):
        self.data = np.asarray(self.data)
        if self.data.ndim != 3:
            raise ShapeError(f"spectrogram must be (M, T, F), got shape {self.data.shape}")
        if self.data.shape[0] < 1:
            raise ShapeError("spectrogram needs at least one channel")
        if self.data.shape[2] != self.config.n_bins:
            raise ShapeError(
                f"spectrogram has {self.data.shape[2]} bins, config implies {self.config.n_bins}"
            )

    @property
    def n_channels(self):
        return self.data.shape[0]

    @property
    def n_frames(self):
        return self.data.shape[1]

    @property
    def n_bins(self):
        return self.data.shape[2]

    def channel(self, m):
        return self.data[m]


def _as_channels(signal):
    if isinstance(signal, np.ndarray):
        x = signal
        if x.ndim == 1:
            x = x[np.newaxis]
    else:
        chans = [np.asarray(c, dtype=float) for c in signal]
        if not chans:
            raise ShapeError("empty input: no channels")
        lengths = {len(c) for c in chans}
        if len(lengths) != 1:
            raise ShapeError(f"channel length mismatch: {sorted(lengths)}")
        x = np.stack(chans)
    if x.ndim != 2:
        raise ShapeError(f"signal must be (M, N) or (N,), got shape {x.shape}")
    return np.asarray(x, dtype=np.float64)


def analyze(signal, cfg=StftConfig()):
    """Analyze per-channel signals into a :class:`MultichannelSpectrogram`.

    Frames start at sample 0 (no centering) and the trailing partial frame
    is dropped, so ``T = (N - window_len) // hop + 1``.

    Parameters
    ----------
    signal : array_like
        ``(M, N)`` array, ``(N,)`` mono array, or a sequence of equal-length
        channels.
    cfg : StftConfig
    """
    x = _as_channels(signal)
    n_ch, n_samples = x.shape
    if n_ch == 0 or n_samples == 0:
        raise ShapeError("empty input")
    if n_samples < cfg.window_len:
        raise ShapeError(
            f"signal has {n_samples} samples, shorter than one window ({cfg.window_len})"
        )
    if not np.all(np.isfinite(x)):
        raise ShapeError("signal contains non-finite samples")

    n_frames = cfg.n_frames(n_samples)
    frames = np.lib.stride_tricks.sliding_window_view(x, cfg.window_len, axis=1)
    frames = frames[:, :: cfg.hop][:, :n_frames]
    spec = np.fft.rfft(frames * cfg.window, n=cfg.fft_len, axis=-1)
    return MultichannelSpectrogram(spec, cfg)


def synthesis_window(cfg):
    """Dual window for weighted overlap-add given the analysis window and hop.

    ``s(n) = w(n) / sum_k w(n + k*hop)^2``; reconstruction is exact wherever
    every sample is covered by ``window_len / hop`` frames.
    """
    w = cfg.window
    # Periodic sum of w^2 over hop-shifted copies (NOLA denominator).
    padded = np.zeros(-(-cfg.window_len // cfg.hop) * cfg.hop)
    padded[: cfg.window_len] = w**2
    denom = padded.reshape(-1, cfg.hop).sum(axis=0)
    if denom.min() <= 1e-10 * denom.max():
        raise ConfigError(
            f"window {cfg.window_kind!r} with window_len={cfg.window_len}, hop={cfg.hop} "
            "violates the overlap-add constraint (summed squared window vanishes)"
        )
    return w / np.tile(denom, len(padded) // cfg.hop)[: cfg.window_len]


def synthesize(spec, cfg=StftConfig()):
    """Weighted overlap-add resynthesis of one channel.

    ``spec`` is a ``(T, F)`` complex array (or a single-channel
    MultichannelSpectrogram). Output has ``(T - 1) * hop + window_len``
    samples. The first and last ``window_len - hop`` samples are not fully
    covered and only approximately reconstructed.
    """
    if isinstance(spec, MultichannelSpectrogram):
        if spec.n_channels != 1:
            raise ShapeError("synthesize expects a single channel")
        cfg = spec.config
        spec = spec.data[0]
    spec = np.asarray(spec)
    if spec.ndim != 2 or spec.shape[1] != cfg.n_bins:
        raise ShapeError(f"expected (T, {cfg.n_bins}) spectrogram, got {spec.shape}")
    s = synthesis_window(cfg)
    n_frames = spec.shape[0]
    if n_frames == 0:
        return np.zeros(0)
    frames = np.fft.irfft(spec, n=cfg.fft_len, axis=-1)[:, : cfg.window_len] * s
    out = np.zeros((n_frames - 1) * cfg.hop + cfg.window_len)
    for t in range(n_frames):
        out[t * cfg.hop : t * cfg.hop + cfg.window_len] += frames[t]
    return out
