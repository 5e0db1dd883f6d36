"""Feature extraction pipeline and the binary feature file format.

Three per-frame streams of ``n_bands`` values each:

* ``erb-spectral``  band energies of the reference channel,
* ``erb-g-lstsc``   ERB-reduced coherence with the global forgetting factor,
* ``erb-l-lstsc``   the same with the local forgetting factor.

Single-channel input yields the spectral stream only.

File layout (all little-endian)::

    8 bytes   magic  b"LSTSCFF\\x00"
    uint16    format version
    uint16    reserved (0)
    uint32    header length H in bytes
    H bytes   UTF-8 JSON header (sorted keys)
    payload   float32, frame-major: [frame][stream][band]
"""

import json
import os
import struct
from dataclasses import dataclass, field

import numpy as np

from .erb import DEFAULT_BANDS, build_filterbank, erb_coherence, erb_spectrum
from .errors import AudioIOError, ConfigError, ShapeError
from .spatial import GLOBAL, LOCAL, coherence_from_whitened, short_term_rtf_all, whiten
from .stft import StftConfig, analyze

MAGIC = b"LSTSCFF\x00"
VERSION = 1
SPECTRAL, GLOBAL_LSTSC, LOCAL_LSTSC = "erb-spectral", "erb-g-lstsc", "erb-l-lstsc"
STREAMS = (SPECTRAL, GLOBAL_LSTSC, LOCAL_LSTSC)
_PREFIX = struct.Struct("<8sHHI")


@dataclass
class FeatureFile:
    """Aligned feature streams, ``data`` shaped (n_frames, n_streams, n_bands), float32."""

    data: np.ndarray
    streams: tuple
    stft: dict = field(default_factory=lambda: StftConfig().to_dict())
    lambdas: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype="<f4")
        self.streams = tuple(self.streams)
        if self.data.ndim != 3 or self.data.shape[1] != len(self.streams):
            raise ShapeError(
                f"data shape {self.data.shape} does not match {len(self.streams)} streams"
            )
        unknown = set(self.streams) - set(STREAMS)
        if unknown:
            raise ConfigError(f"unknown stream labels {sorted(unknown)}")

    @property
    def n_frames(self):
        return self.data.shape[0]

    @property
    def n_streams(self):
        return self.data.shape[1]

    @property
    def n_bands(self):
        return self.data.shape[2]

    def stream(self, label):
        return self.data[:, self.streams.index(label), :]

    def header(self):
        return {
            "n_frames": self.n_frames,
            "n_bands": self.n_bands,
            "n_streams": self.n_streams,
            "streams": list(self.streams),
            "stft": self.stft,
            "lambdas": self.lambdas,
            "dtype": "float32-le",
            "layout": "frame-major [frame][stream][band]",
            "extra": self.extra,
        }

    def to_bytes(self):
        head = json.dumps(self.header(), sort_keys=True, separators=(",", ":")).encode()
        return _PREFIX.pack(MAGIC, VERSION, 0, len(head)) + head + self.data.tobytes(order="C")

    @classmethod
    def from_bytes(cls, blob, source="<bytes>"):
        if len(blob) < _PREFIX.size:
            raise AudioIOError(f"{source}: truncated feature file")
        magic, version, _, n_head = _PREFIX.unpack_from(blob)
        if magic != MAGIC:
            raise AudioIOError(f"{source}: not a feature file (bad magic)")
        if version != VERSION:
            raise AudioIOError(f"{source}: unsupported feature file version {version}")
        start = _PREFIX.size + n_head
        try:
            head = json.loads(blob[_PREFIX.size : start].decode())
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise AudioIOError(f"{source}: corrupt header ({exc})") from exc
        shape = (head["n_frames"], head["n_streams"], head["n_bands"])
        payload = blob[start:]
        if len(payload) != 4 * int(np.prod(shape)):
            raise AudioIOError(
                f"{source}: payload has {len(payload)} bytes, header implies {4 * int(np.prod(shape))}"
            )
        data = np.frombuffer(payload, dtype="<f4").reshape(shape).copy()
        return cls(data, tuple(head["streams"]), head["stft"], head["lambdas"], head.get("extra", {}))

    def write(self, path):
        try:
            with open(path, "wb") as fh:
                fh.write(self.to_bytes())
        except OSError as exc:
            raise AudioIOError(f"{path}: cannot write ({exc})") from exc

    @classmethod
    def read(cls, path):
        try:
            with open(path, "rb") as fh:
                blob = fh.read()
        except OSError as exc:
            raise AudioIOError(f"{path}: cannot read ({exc})") from exc
        return cls.from_bytes(blob, os.fspath(path))

    def to_csv(self, path):
        cols = [f"{s}_{b}" for s in self.streams for b in range(self.n_bands)]
        flat = self.data.reshape(self.n_frames, -1)
        with open(path, "w", newline="") as fh:
            fh.write("frame," + ",".join(cols) + "\n")
            for l, row in enumerate(flat):
                fh.write(f"{l}," + ",".join(repr(float(v)) for v in row) + "\n")


@dataclass
class ExtractionResult:
    """Full-precision intermediate results of :func:`extract`."""

    spectral: np.ndarray
    gamma: dict
    erb_gamma: dict
    filterbank: object
    config: StftConfig


def extract(signal, cfg=StftConfig(), n_bands=DEFAULT_BANDS, rtf_global=GLOBAL,
            rtf_local=LOCAL, streams=None, fb=None):
    """Compute ERB spectral and ERB-LSTSC streams for an (M, N) signal.

    ``streams`` defaults to all three for M >= 2 and to the spectral stream
    for mono input. Requesting a spatial stream for mono input raises
    ShapeError. Returns ``(FeatureFile, ExtractionResult)``.
    """
    spec = analyze(signal, cfg)
    n_ch = spec.n_channels
    if streams is None:
        streams = STREAMS if n_ch >= 2 else (SPECTRAL,)
    streams = tuple(streams)
    if n_ch < 2 and any(s != SPECTRAL for s in streams):
        raise ShapeError("spatial streams need at least two channels; input is mono")
    if fb is None:
        fb = build_filterbank(cfg, n_bands)
    ref = rtf_global.reference_channel
    if ref >= n_ch:
        raise ConfigError(f"reference channel {ref} out of range for {n_ch} channel(s)")
    if rtf_local.reference_channel != ref or rtf_local.r_frames != rtf_global.r_frames:
        raise ConfigError("global and local configs must share r_frames and reference channel")

    spectral = erb_spectrum(spec.data[ref], fb)
    gamma, erb_gamma = {}, {}
    wanted = {GLOBAL_LSTSC: rtf_global, LOCAL_LSTSC: rtf_local}
    wanted = {k: v for k, v in wanted.items() if k in streams}
    if wanted:
        r_white = whiten(short_term_rtf_all(spec, rtf_global), rtf_global.eps)
        for label, rcfg in wanted.items():
            gamma[label] = coherence_from_whitened(r_white, rcfg)
            erb_gamma[label] = erb_coherence(gamma[label].gamma, fb)

    planes = [spectral if s == SPECTRAL else erb_gamma[s] for s in streams]
    data = np.stack(planes, axis=1)
    lambdas = {k: v.lam for k, v in wanted.items()}
    ff = FeatureFile(
        data, streams, cfg.to_dict(), lambdas,
        {"n_channels": n_ch, "reference_channel": ref, "r_frames": rtf_global.r_frames},
    )
    return ff, ExtractionResult(spectral, gamma, erb_gamma, fb, cfg)
