import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from lstsc.errors import AudioIOError, ConfigError, SampleRateError, ShapeError
from lstsc.stft import StftConfig, analyze, synthesis_window, synthesize
from lstsc.wavio import read_wav, write_wav

CFG = StftConfig()


def brute_dft(x):
    n = len(x)
    k = np.arange(n // 2 + 1)[:, None]
    return np.sum(x[None, :] * np.exp(-2j * np.pi * k * np.arange(n)[None, :] / n), axis=1)


def test_default_config():
    assert (CFG.sample_rate, CFG.window_len, CFG.hop, CFG.fft_len) == (16000, 512, 256, 512)
    assert CFG.window_kind == "hann"
    assert CFG.n_bins == 257


def test_eight_second_clip_frame_count():
    # (128000 - 512) // 256 + 1 = 499
    spec = analyze(np.zeros((4, 128000)), CFG)
    assert spec.data.shape == (4, 499, 257)


def test_zero_signal_gives_zero_spectrogram():
    assert not np.any(analyze(np.zeros(4000)).data)


def test_matches_brute_force_dft():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(1500)
    spec = analyze(x).data[0]
    for t in (0, 2, 3):
        seg = x[t * 256 : t * 256 + 512] * CFG.window
        np.testing.assert_allclose(spec[t], brute_dft(seg), atol=1e-9)


@pytest.mark.parametrize("k", [3, 40, 128, 200])
def test_bin_centred_cosine_concentrates_energy(k):
    n = np.arange(4096)
    x = np.cos(2 * np.pi * k * CFG.sample_rate / CFG.fft_len * n / CFG.sample_rate + 0.3)
    spec = analyze(x).data[0]
    power = np.abs(spec) ** 2
    share = power[:, k - 1 : k + 2].sum(axis=1) / power.sum(axis=1)
    assert share.min() >= 0.99


def test_frame_alignment_starts_at_zero_and_drops_tail():
    x = np.zeros(512 + 256 + 100)
    x[0] = 1.0
    spec = analyze(x).data[0]
    assert spec.shape[0] == 2
    # first sample sits under w(0) = 0 for periodic Hann
    assert np.allclose(spec[0], 0.0)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, 1100, elements=st.floats(-1e3, 1e3)))
def test_parseval(x):
    spec = analyze(x).data[0]
    n = CFG.fft_len
    for t in range(spec.shape[0]):
        seg = x[t * CFG.hop : t * CFG.hop + CFG.window_len] * CFG.window
        p = np.abs(spec[t]) ** 2
        onesided = p[0] + p[-1] + 2 * p[1:-1].sum()
        e = np.sum(seg**2)
        assert abs(onesided / n - e) <= 1e-6 * max(e, 1e-300) + 1e-20


@settings(max_examples=25, deadline=None)
@given(
    st.floats(-10, 10),
    st.floats(-10, 10),
    st.integers(0, 2**31 - 1),
)
def test_linearity(a, b, seed):
    rng = np.random.default_rng(seed)
    x, y = rng.standard_normal((2, 2, 1300))
    lhs = analyze(a * x + b * y).data
    rhs = a * analyze(x).data + b * analyze(y).data
    scale = np.abs(lhs).max() + np.abs(rhs).max() + 1e-300
    assert np.abs(lhs - rhs).max() <= 1e-9 * scale


def test_round_trip_interior_error_below_minus_50_db():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(16000)
    y = synthesize(analyze(x).data[0], CFG)
    edge = CFG.window_len - CFG.hop
    xi, yi = x[edge : len(y) - edge], y[edge : len(y) - edge]
    err_db = 10 * np.log10(np.sum((xi - yi) ** 2) / np.sum(xi**2))
    assert err_db <= -50


def test_round_trip_other_hops():
    rng = np.random.default_rng(2)
    x = rng.standard_normal(9000)
    for cfg in (StftConfig(window_len=400, hop=160, fft_len=512), StftConfig(hop=128)):
        y = synthesize(analyze(x, cfg).data[0], cfg)
        edge = cfg.window_len - cfg.hop
        np.testing.assert_allclose(y[edge : len(y) - edge], x[edge : len(y) - edge], atol=1e-9)


def test_zero_spectrogram_synthesizes_silence():
    assert not np.any(synthesize(np.zeros((7, 257), complex), CFG))


def test_single_frame_is_windowed_twice():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(512)
    y = synthesize(analyze(x).data[0], CFG)
    assert len(y) == 512
    # one overlap-add step: synthesis window times the analysis-windowed frame
    hand = synthesis_window(CFG) * CFG.window * x
    np.testing.assert_allclose(y, hand, atol=1e-12)


def test_structured_errors():
    with pytest.raises(ShapeError):
        analyze([np.zeros(1000), np.zeros(999)])
    with pytest.raises(ShapeError):
        analyze([])
    with pytest.raises(ShapeError):
        analyze(np.zeros((2, 0)))
    with pytest.raises(ShapeError):
        analyze(np.zeros(100))
    with pytest.raises(ShapeError):
        analyze(np.array([np.nan] * 600))
    with pytest.raises(ConfigError):
        StftConfig(hop=600)
    with pytest.raises(ConfigError):
        StftConfig(window_len=500, fft_len=500)
    with pytest.raises(ConfigError):
        StftConfig(window_len=1024)
    with pytest.raises(ConfigError):
        synthesize(np.zeros((3, 257), complex), StftConfig(hop=512))


def test_wav_round_trip(tmp_path):
    rng = np.random.default_rng(4)
    x = rng.uniform(-0.9, 0.9, (3, 1000))
    write_wav(tmp_path / "f.wav", x, 16000)
    y, rate = read_wav(tmp_path / "f.wav", expected_rate=16000)
    assert rate == 16000 and y.shape == (3, 1000)
    np.testing.assert_allclose(y, x.astype(np.float32), rtol=0, atol=0)
    write_wav(tmp_path / "p.wav", x, 16000, subtype="pcm16")
    y, _ = read_wav(tmp_path / "p.wav")
    np.testing.assert_allclose(y, x, atol=1.0 / 32768)


def test_wav_errors(tmp_path):
    write_wav(tmp_path / "a.wav", np.zeros(100), 8000)
    with pytest.raises(SampleRateError):
        read_wav(tmp_path / "a.wav", expected_rate=16000)
    bad = tmp_path / "bad.wav"
    bad.write_bytes(b"RIFX\x00\x00garbage")
    with pytest.raises(AudioIOError, match="bad.wav"):
        read_wav(bad)
    with pytest.raises(AudioIOError, match="missing.wav"):
        read_wav(tmp_path / "missing.wav")
