"""ERB-scale triangular filterbank and band reduction of spectra / coherence.

Band centres are uniformly spaced on the Glasberg-Moore ERB-rate scale
from 0 Hz to Nyquist. Each band is a triangle on the ERB-rate axis reaching
from its lower to its upper neighbour's centre, so neighbours overlap by
50% and the weights sum to one at every bin. The first and last bands are
half-triangles clamped at 0 Hz and Nyquist.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError
from .stft import StftConfig

DEFAULT_BANDS = 16


def hz_to_erb_rate(f):
    """Glasberg & Moore (1990) ERB-rate, in ERB units ("Cams")."""
    return 21.4 * np.log10(1.0 + 0.00437 * np.asarray(f, dtype=float))


def erb_rate_to_hz(e):
    return (10.0 ** (np.asarray(e, dtype=float) / 21.4) - 1.0) / 0.00437


def erb_bandwidth(f):
    """Equivalent rectangular bandwidth in Hz at centre frequency ``f``."""
    return 24.7 * (4.37e-3 * np.asarray(f, dtype=float) + 1.0)


@dataclass(frozen=True)
class ErbFilterbank:
    """Band weights ``weights`` (B x F), normalizers and band geometry in Hz."""

    weights: np.ndarray
    centers_hz: np.ndarray
    lower_hz: np.ndarray
    upper_hz: np.ndarray
    freqs_hz: np.ndarray

    @property
    def n_bands(self):
        return self.weights.shape[0]

    @property
    def n_bins(self):
        return self.weights.shape[1]

    @property
    def normalizers(self):
        return self.weights.sum(axis=1)

    def to_csv(self, path_or_file):
        """Dump band geometry and weights; one row per band."""
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(
                ["band", "lower_hz", "center_hz", "upper_hz", "normalizer"]
                + [f"w_{f:.2f}" for f in self.freqs_hz]
            )
            for b in range(self.n_bands):
                writer.writerow(
                    [b, f"{self.lower_hz[b]:.6f}", f"{self.centers_hz[b]:.6f}",
                     f"{self.upper_hz[b]:.6f}", repr(float(self.normalizers[b]))]
                    + [repr(float(w)) for w in self.weights[b]]
                )
        finally:
            if own:
                fh.close()


def build_filterbank(cfg=StftConfig(), n_bands=DEFAULT_BANDS):
    """Triangular ERB filterbank over the one-sided STFT bins of ``cfg``.

    Raises ConfigError if ``n_bands < 2`` or if a band would receive no
    positive weight at any bin.
    """
    if int(n_bands) != n_bands or n_bands < 2:
        raise ConfigError(f"n_bands must be an integer >= 2, got {n_bands!r}")
    n_bands = int(n_bands)
    freqs = cfg.bin_frequencies()
    if n_bands > len(freqs):
        raise ConfigError(f"{n_bands} bands cannot be spread over {len(freqs)} bins")

    nyquist = cfg.sample_rate / 2.0
    e_max = hz_to_erb_rate(nyquist)
    centers_e = np.linspace(0.0, e_max, n_bands)
    spacing = centers_e[1] - centers_e[0]
    e_bins = hz_to_erb_rate(freqs)

    # Distance in band units from each centre; triangle = max(0, 1 - |d|).
    d = (e_bins[np.newaxis, :] - centers_e[:, np.newaxis]) / spacing
    weights = np.clip(1.0 - np.abs(d), 0.0, None)
    # Half triangles: bins beyond the outermost centres belong fully to them.
    weights[0, e_bins <= centers_e[0]] = 1.0
    weights[-1, e_bins >= centers_e[-1]] = 1.0

    empty = np.flatnonzero(weights.sum(axis=1) <= 0.0)
    if empty.size:
        raise ConfigError(
            f"{n_bands} bands too many for {len(freqs)} bins: "
            f"band(s) {empty.tolist()[:5]} own no frequency bin"
        )

    centers = erb_rate_to_hz(centers_e)
    centers[0], centers[-1] = 0.0, nyquist
    lower = np.concatenate([[0.0], centers[:-1]])
    upper = np.concatenate([centers[1:], [nyquist]])
    return ErbFilterbank(weights, centers, lower, upper, freqs)


def _check_bins(x, fb):
    x = np.asarray(x)
    if x.shape[-1] != fb.n_bins:
        raise ShapeError(f"input has {x.shape[-1]} bins, filterbank expects {fb.n_bins}")
    return x


def erb_spectrum(frame, fb):
    """Band energies ``sum_f w_b(f) |Y(f)|^2`` (unnormalized).

    ``frame`` is a complex (F,) frame or (T, F) spectrogram. Use
    :func:`erb_power` when the power spectrum is already at hand.
    """
    y = _check_bins(frame, fb)
    return (np.abs(y) ** 2) @ fb.weights.T


def erb_power(power, fb):
    """Band energies from a power spectrum (already ``|Y|^2``)."""
    p = _check_bins(power, fb)
    return np.asarray(p, dtype=float) @ fb.weights.T


def erb_coherence(gamma, fb):
    """Normalized weighted mean of ``gamma`` per band; (F,) -> (B,), (T, F) -> (T, B)."""
    g = _check_bins(gamma, fb)
    out = (np.asarray(g, dtype=float) @ fb.weights.T) / fb.normalizers
    return np.clip(out, -1.0, 1.0)
