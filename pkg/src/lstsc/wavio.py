"""Multichannel WAV reading/writing on top of :mod:`scipy.io.wavfile`."""

import os
import struct
import warnings

import numpy as np
from scipy.io import wavfile

from .errors import AudioIOError, SampleRateError


def read_wav(path, expected_rate=None):
    """Read a WAV file as float64 ``(M, N)`` in [-1, 1).

    Accepts 16-bit PCM and 32-bit IEEE float. 32-bit PCM is accepted too.
    Raises SampleRateError when ``expected_rate`` is given and differs.
    """
    path = os.fspath(path)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", wavfile.WavFileWarning)
            rate, data = wavfile.read(path)
    except FileNotFoundError as exc:
        raise AudioIOError(f"{path}: no such file") from exc
    except (ValueError, EOFError, OSError, struct.error) as exc:
        raise AudioIOError(f"{path}: cannot read WAV ({exc})") from exc

    if data.dtype == np.int16:
        x = data.astype(np.float64) / 32768.0
    elif data.dtype == np.int32:
        x = data.astype(np.float64) / 2147483648.0
    elif data.dtype in (np.float32, np.float64):
        x = data.astype(np.float64)
    else:
        raise AudioIOError(f"{path}: unsupported sample format {data.dtype}")
    if expected_rate is not None and rate != expected_rate:
        raise SampleRateError(
            f"{path}: sample rate {rate} Hz does not match configured {expected_rate} Hz"
        )
    x = x.reshape(len(x), -1).T
    return np.ascontiguousarray(x), int(rate)


def write_wav(path, signal, sample_rate, subtype="float32"):
    """Write ``(M, N)`` or ``(N,)`` samples. ``subtype`` is 'float32' or 'pcm16'."""
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim == 1:
        x = x[np.newaxis]
    if subtype == "float32":
        data = x.T.astype("<f4")
    elif subtype == "pcm16":
        data = np.clip(np.round(x.T * 32768.0), -32768, 32767).astype("<i2")
    else:
        raise ValueError(f"unknown subtype {subtype!r}")
    try:
        wavfile.write(os.fspath(path), int(sample_rate), data)
    except OSError as exc:
        raise AudioIOError(f"{path}: cannot write WAV ({exc})") from exc
