"""``lstsc`` command line: extract, simulate, evaluate, filterbank.

Exit codes: 0 success, 2 usage, 3 I/O, 4 numeric or contract violation.
"""

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path
from types import SimpleNamespace

import numpy as np
import yaml

from . import __version__
from .erb import DEFAULT_BANDS, build_filterbank
from .errors import (
    AudioIOError,
    ConfigError,
    GeometryError,
    LabelError,
    LstscError,
    NumericError,
    SampleRateError,
    ShapeError,
)
from .evaluate import combine_reports, evaluate_scene
from .features import SPECTRAL, STREAMS, extract
from .scene import LabeledScene, preset_config, render_scene, scene_from_config
from .spatial import RtfConfig
from .stft import StftConfig
from .wavio import read_wav, write_wav

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_CONTRACT = 0, 2, 3, 4
DEFAULT_SWEEP = tuple(np.round(np.arange(-0.5, 1.0001, 0.05), 2))


class UsageError(LstscError):
    pass


def _exit_code(exc):
    if isinstance(exc, (UsageError, ConfigError)):
        return EXIT_USAGE
    if isinstance(exc, SampleRateError):
        return EXIT_CONTRACT
    if isinstance(exc, AudioIOError):
        return EXIT_IO
    return EXIT_CONTRACT


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise AudioIOError(f"{path}: cannot read config ({exc})") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML ({exc})") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: config must be a mapping")
    return cfg


def _pick(flag, cfg, key, default):
    if flag is not None:
        return flag
    return cfg.get(key, default)


def _pipeline_settings(args, cfg):
    """STFT config, RTF configs and band count from flags over config over defaults."""
    feat = cfg.get("features", cfg)
    stft = _stft_from(feat)
    r_frames = int(_pick(args.r_frames, feat, "r_frames", 4))
    ref = int(_pick(args.ref_channel, feat, "ref_channel", 0))
    lam_g = float(_pick(args.lambda_global, feat, "lambda_global", 0.999))
    lam_l = float(_pick(getattr(args, "lambda_local", None), feat, "lambda_local", 0.01))
    bands = int(_pick(args.bands, feat, "bands", DEFAULT_BANDS))
    rtf_g = RtfConfig(r_frames=r_frames, lam=lam_g, reference_channel=ref)
    rtf_l = RtfConfig(r_frames=r_frames, lam=lam_l, reference_channel=ref)
    return stft, rtf_g, rtf_l, bands


def _stft_from(feat):
    try:
        return StftConfig(**feat.get("stft", {}))
    except TypeError as exc:
        raise ConfigError(f"bad stft section in config: {exc}") from exc


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# commands


def cmd_extract(args):
    cfg = _load_config(args.config)
    stft, rtf_g, rtf_l, bands = _pipeline_settings(args, cfg)
    signal, _ = read_wav(args.input, expected_rate=stft.sample_rate)
    streams = None
    if args.streams:
        streams = tuple(s.strip() for s in args.streams.split(",") if s.strip())
        bad = [s for s in streams if s not in STREAMS]
        if bad:
            raise UsageError(f"unknown stream(s) {bad}; choose from {', '.join(STREAMS)}")
        if signal.shape[0] < 2 and any(s != SPECTRAL for s in streams):
            raise UsageError(
                f"{args.input}: spatial streams requested but the input has one channel"
            )
    fb = build_filterbank(stft, bands)
    ff, _ = extract(signal, stft, bands, rtf_g, rtf_l, streams, fb)
    ff.extra["input"] = Path(args.input).name
    out = Path(args.out) if args.out else Path(args.input).with_suffix(".lstf")
    ff.write(out)
    if args.csv:
        ff.to_csv(args.csv)
    if args.dump_filterbank:
        fb.to_csv(args.dump_filterbank)
    print(f"wrote {out}: n_frames={ff.n_frames} n_bands={ff.n_bands} n_streams={ff.n_streams} "
          f"streams={','.join(ff.streams)}")
    return EXIT_OK


def cmd_simulate(args):
    if Path(args.scene).is_file():
        cfg = _load_config(args.scene)
        base = Path(args.scene).resolve().parent
    else:
        cfg = preset_config(args.scene)
        base = None
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.preroll_seconds is not None:
        cfg["preroll_seconds"] = args.preroll_seconds
    spec, resolved = scene_from_config(cfg, base_dir=base)
    scene = render_scene(spec)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = {"mixture.wav": scene.mixture}
    for name, stem in scene.stems.items():
        files[f"{name}.wav"] = stem
    for i, src in enumerate(spec.sources):
        name = src.name or f"{src.role}{i}"
        files[f"{name}_dry.wav"] = src.signal
    hashes = {}
    for fname, x in files.items():
        write_wav(out / fname, x, spec.sample_rate)
        hashes[fname] = _sha256(out / fname)

    manifest = {
        "format": "lstsc-scene/1",
        "generator": f"lstsc {__version__}",
        "config": resolved,
        "seed": spec.seed,
        "sample_rate": spec.sample_rate,
        "n_mics": spec.geometry.n_mics,
        "reference_mic": spec.reference_mic,
        "snr_db": spec.snr_db,
        "preroll_seconds": spec.preroll_seconds,
        "mixture": "mixture.wav",
        "stems": {f"{k}.wav": r for k, r in scene.roles.items()},
        "sha256": hashes,
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(files)} WAVs and manifest.json to {out}")
    return EXIT_OK


def load_scene_dir(path):
    """Rebuild a LabeledScene (mixture, stems, roles) from a ``simulate`` output directory."""
    path = Path(path)
    mpath = path / "manifest.json"
    try:
        manifest = json.loads(mpath.read_text())
    except OSError as exc:
        raise AudioIOError(f"{mpath}: cannot read manifest ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise AudioIOError(f"{mpath}: corrupt manifest ({exc})") from exc
    fs = int(manifest["sample_rate"])
    mixture, _ = read_wav(path / manifest.get("mixture", "mixture.wav"), expected_rate=fs)
    stems, roles = {}, {}
    for fname, role in manifest.get("stems", {}).items():
        if role not in ("target", "interference"):
            continue
        stems[fname], _ = read_wav(path / fname, expected_rate=fs)
        roles[fname] = role
    if "target" not in roles.values():
        raise LabelError(f"{path}: scene has no target stem")
    spec = SimpleNamespace(
        sample_rate=fs,
        reference_mic=int(manifest.get("reference_mic", 0)),
        snr_db=manifest.get("snr_db"),
        preroll_seconds=float(manifest.get("preroll_seconds", 0.0)),
    )
    return LabeledScene(mixture, stems, roles, spec)


def _parse_sweep(text):
    if text is None:
        return None
    if text == "default":
        return DEFAULT_SWEEP
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--mask-sweep expects comma-separated thresholds, got {text!r}") from exc


def cmd_evaluate(args):
    cfg = _load_config(args.config)
    stft, rtf_g, _, bands = _pipeline_settings(args, cfg)
    sweep = _parse_sweep(args.mask_sweep)
    fb = build_filterbank(stft, bands)
    reports, sweeps = [], []
    for d in args.scene_dirs:
        scene = load_scene_dir(d)
        if scene.interference is None:
            raise LabelError(f"{d}: no interference stem, so no negative labels")
        if args.ref_channel is not None:
            scene.spec.reference_mic = args.ref_channel
        ev = evaluate_scene(scene, stft, rtf_g, fb, bands, args.preroll_seconds, sweep)
        reports.append(ev.report)
        for thr, enh, unp, gain in ev.sweep:
            sweeps.append((str(d), scene.spec.snr_db, thr, enh, unp, gain))
        print(f"scene={d} snr_db={scene.spec.snr_db} auc={ev.report.auc:.6f}")
    total = combine_reports(reports)
    for line in total.lines():
        print(line)

    out = Path(args.out) if args.out else Path("report.csv")
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scene", "snr_db", "auc", "n_positive", "n_negative"]
                   + [f"band_{b}_auc" for b in range(bands)])
        for d, r in zip(args.scene_dirs, reports):
            snr = next(iter(r.per_snr), "")
            w.writerow([str(d), snr, f"{r.auc:.6f}", r.n_positive, r.n_negative]
                       + [f"{a:.6f}" for a in r.band_auc])
        for snr in sorted(total.per_snr):
            w.writerow(["mean", snr, f"{total.per_snr[snr]:.6f}", "", ""] + [""] * bands)
    if sweep is not None:
        sweep_path = Path(args.csv) if args.csv else out.with_name(out.stem + "_sweep.csv")
        with open(sweep_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["scene", "snr_db", "threshold", "si_snr_enhanced_db",
                        "si_snr_unprocessed_db", "gain_db"])
            for row in sweeps:
                w.writerow(list(row[:3]) + [f"{v:.4f}" for v in row[3:]])
        best = max(sweeps, key=lambda r: r[5]) if sweeps else None
        if best is not None:
            print(f"best_gain_db={best[5]:.4f} threshold={best[2]:g} scene={best[0]}")
    return EXIT_OK


def cmd_filterbank(args):
    cfg = _load_config(args.config)
    stft = _stft_from(cfg.get("features", cfg))
    bands = int(_pick(args.bands, cfg.get("features", cfg), "bands", DEFAULT_BANDS))
    fb = build_filterbank(stft, bands)
    if args.out:
        fb.to_csv(args.out)
    else:
        fb.to_csv(sys.stdout)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_feature_flags(p, local=True):
    p.add_argument("--config", help="YAML config (features: stft/bands/r_frames/...)")
    p.add_argument("--lambda-global", type=float, help="global forgetting factor (default 0.999)")
    if local:
        p.add_argument("--lambda-local", type=float, help="local forgetting factor (default 0.01)")
    p.add_argument("--r-frames", type=int, help="short-term RTF window R, even (default 4)")
    p.add_argument("--bands", type=int, help="number of ERB bands (default 16)")
    p.add_argument("--ref-channel", type=int, help="0-based reference microphone (default 0)")


def build_parser():
    parser = argparse.ArgumentParser(prog="lstsc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"lstsc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="ERB spectral + ERB-LSTSC features from a WAV")
    p.add_argument("input", help="multichannel WAV")
    p.add_argument("--out", help="feature file (default: input with .lstf suffix)")
    p.add_argument("--csv", help="also write the features as CSV")
    p.add_argument("--streams", help=f"comma-separated subset of {','.join(STREAMS)}")
    p.add_argument("--dump-filterbank", metavar="CSV", help="write filterbank weights as CSV")
    _add_feature_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("simulate", help="render a scene preset or YAML scene config")
    p.add_argument("scene", help="YAML path or preset such as uca4-anechoic-snr5")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="override the scene seed")
    p.add_argument("--preroll-seconds", type=float, help="interference-only lead-in")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="discrimination report for simulated scene dirs")
    p.add_argument("scene_dirs", nargs="+", help="directories written by 'simulate'")
    p.add_argument("--out", help="report CSV (default report.csv)")
    p.add_argument("--csv", help="mask sweep CSV (default <out>_sweep.csv)")
    p.add_argument("--mask-sweep", nargs="?", const="default", metavar="THRESHOLDS",
                   help="coherence-mask SI-SNR sweep; optional comma-separated thresholds")
    p.add_argument("--preroll-seconds", type=float,
                   help="frames before this time are not scored (default: from manifest)")
    _add_feature_flags(p, local=False)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("filterbank", help="dump the ERB filterbank as CSV")
    p.add_argument("--bands", type=int)
    p.add_argument("--config")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_filterbank)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (LstscError, GeometryError, NumericError, ShapeError) as exc:
        print(f"lstsc {args.command}: error: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
