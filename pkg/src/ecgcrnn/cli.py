"""Command-line surface: prepare, train, eval, predict.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from . import CLASS_ORDER, __version__
from . import data, dsp, metrics, training
from .nn import (ArchitectureConfig, build_model, load_checkpoint,
                 model_forward, save_checkpoint)
from .nn.config import ConfigurationError
from .nn.ops import NumericError
from .windowing import extract_windows

log = logging.getLogger(__name__)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    """Run configuration; defaults match the published training protocol."""

    manifest: str = ""
    window_size: int = 1024
    conv_layers: int = 7
    num_classes: int = 4
    band_low: float = 0.5
    band_high: float = 40.0
    target_fs: float = 200.0
    epochs: int = 100
    batch_size: int = 50
    learning_rate: float = 5e-4
    patience: int = 5
    lr_floor: float = 1e-5
    dropout: float = 0.5
    sign_flip: bool = True
    random_offset: bool = True
    strict_arch: bool = True
    seed: int = 0
    out_dir: str = "runs/default"

    @classmethod
    def load(cls, path) -> "RunConfig":
        """Read a config file, emitting explicit defaults on first run."""
        path = Path(path)
        if not path.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(asdict(cls()), indent=2, sort_keys=True) + "\n")
            log.info("wrote default config to %s", path)
            return cls()
        try:
            return cls(**json.loads(path.read_text()))
        except (json.JSONDecodeError, TypeError) as e:
            raise data.LoadError(f"{path}: bad config: {e}") from e

    def architecture(self) -> ArchitectureConfig:
        return ArchitectureConfig(
            window_size=self.window_size, conv_layers=self.conv_layers,
            num_classes=self.num_classes, dropout_rate=self.dropout,
            strict=self.strict_arch)


def _label_index(label: str, k: int) -> int:
    idx = CLASS_ORDER.index(label)
    if idx >= k:
        raise data.LoadError(f"label {label!r} outside the {k}-class task")
    return idx


def _preprocess_records(records, scales, root, cfg: RunConfig):
    out = []
    for r in records:
        raw = data.load_signal(r, root)
        stats = dsp.ScaleStats(scales[r.database_id])
        sig = dsp.preprocess(raw, stats, cfg.band_low, cfg.band_high, cfg.target_fs)
        out.append(training.LabeledSignal(
            r.record_id, sig.samples, _label_index(r.label, cfg.num_classes),
            cfg.target_fs))
    return out


def _load_run_inputs(cfg: RunConfig, split_path, scale_path):
    records = data.load_manifest(cfg.manifest)
    root = Path(cfg.manifest).parent
    split = data.load_split(split_path)
    scales = json.loads(Path(scale_path).read_text())
    by_split = {s: [r for r in records if split.get(r.record_id) == s]
                for s in data.SPLITS}
    return by_split, scales, root


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_prepare(args) -> int:
    records = data.load_manifest(args.manifest)
    if not records:
        raise data.LoadError(f"{args.manifest}: empty manifest")
    targets = tuple(float(t) for t in args.targets.split(","))
    assignment = data.stratified_subject_split(records, targets, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    data.write_split(out / "split.txt", assignment)

    root = Path(args.manifest).parent
    scales = {}
    for db in sorted({r.database_id for r in records}):
        train_recs = [r for r in records if r.database_id == db
                      and assignment[r.record_id] == "train"]
        conditioned = []
        for r in train_recs:
            raw = data.load_signal(r, root)
            conditioned.append(dsp.resample(dsp.bandpass_zero_phase(raw)))
        scales[db] = dsp.compute_scale(conditioned).scale
    (out / "scale.json").write_text(json.dumps(scales, indent=2, sort_keys=True) + "\n")
    if args.duration_csv:
        durations = sorted(r.duration_s for r in records)
        with open(args.duration_csv, "w") as f:
            f.write("rank,duration_s\n")
            for i, d in enumerate(durations):
                f.write(f"{i},{d:.3f}\n")
    print(f"prepared {len(records)} records -> {out}/split.txt, {out}/scale.json")
    return 0


def cmd_train(args) -> int:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    for name in ("manifest", "seed", "epochs", "batch_size", "out_dir"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, v)
    if args.arch:
        w, l = (int(v) for v in args.arch.split(","))
        cfg.window_size, cfg.conv_layers = w, l
    if args.no_sign_flip:
        cfg.sign_flip = False
    if args.no_random_offset:
        cfg.random_offset = False
    if args.non_strict:
        cfg.strict_arch = False
    if not cfg.manifest:
        raise UsageError("no manifest given (config 'manifest' or --manifest)")

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    arch = cfg.architecture()
    by_split, scales, root = _load_run_inputs(cfg, args.split_file, args.scale_file)
    train_sigs = _preprocess_records(by_split["train"], scales, root, cfg)
    val_sigs = _preprocess_records(by_split["validation"], scales, root, cfg)

    # reproducibility block: everything needed to re-run bit-identically
    (out / "run.json").write_text(json.dumps(
        {"config": asdict(cfg), "version": __version__}, indent=2, sort_keys=True) + "\n")
    log_path = out / "epochs.log"
    log_path.unlink(missing_ok=True)
    result = training.train(
        arch, train_sigs, val_sigs, seed=cfg.seed, epochs=cfg.epochs,
        batch_size=cfg.batch_size, lr=cfg.learning_rate, patience=cfg.patience,
        lr_floor=cfg.lr_floor, sign_flip=cfg.sign_flip,
        random_offset=cfg.random_offset, log_path=log_path)
    save_checkpoint(out / "checkpoint.bin", arch, result.params)
    print(f"best epoch {result.best_epoch} "
          f"(val acc {result.best_val_accuracy:.4f}) -> {out}/checkpoint.bin")
    return 0


def cmd_eval(args) -> int:
    arch, params = load_checkpoint(args.checkpoint)
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    cfg.manifest = args.manifest or cfg.manifest
    cfg.window_size, cfg.conv_layers = arch.window_size, arch.conv_layers
    cfg.num_classes = arch.num_classes
    by_split, scales, root = _load_run_inputs(cfg, args.split_file, args.scale_file)
    signals = _preprocess_records(by_split[args.split], scales, root, cfg)
    if not signals:
        raise data.LoadError(f"no records in split {args.split!r}")
    cm, preds = training.evaluate(params, arch, signals)
    report = metrics.format_report(cm)
    print(report, end="")
    if args.out:
        Path(args.out).write_text(report)
    if args.predictions_csv:
        with open(args.predictions_csv, "w") as f:
            f.write("record_id,true,predicted\n")
            for sig, p in zip(signals, preds):
                f.write(f"{sig.record_id},{CLASS_ORDER[sig.label]},{CLASS_ORDER[p]}\n")
    return 0


def cmd_predict(args) -> int:
    arch, params = load_checkpoint(args.checkpoint)
    samples, fs = data.load_signal_payload(args.signal)
    raw = dsp.RawSignal(samples, fs)
    stats = None
    if args.scale is not None:
        stats = dsp.ScaleStats(args.scale)
    sig = dsp.preprocess(raw, stats)
    windows = extract_windows(sig.samples, arch.window_size, offset=0)
    probs = model_forward(windows, params, arch, mode="eval")
    pred = int(np.argmax(probs))
    print(json.dumps({
        "class": CLASS_ORDER[pred],
        "probabilities": {CLASS_ORDER[i]: float(p) for i, p in enumerate(probs)},
    }, indent=2))
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    p = _Parser(prog="ecgcrnn", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    pp = sub.add_parser("prepare", help="split a manifest and fit scale statistics")
    pp.add_argument("--manifest", required=True)
    pp.add_argument("--targets", default="0.6,0.2,0.2")
    pp.add_argument("--seed", type=int, default=0)
    pp.add_argument("--out", required=True)
    pp.add_argument("--duration-csv", default=None,
                    help="optionally dump the sorted duration profile")
    pp.set_defaults(func=cmd_prepare)

    pt = sub.add_parser("train", help="train one architecture")
    pt.add_argument("--config", default=None,
                    help="JSON run config; written with defaults if missing")
    pt.add_argument("--manifest", default=None)
    pt.add_argument("--split-file", required=True)
    pt.add_argument("--scale-file", required=True)
    pt.add_argument("--arch", default=None, help="window_size,conv_layers e.g. 1024,7")
    pt.add_argument("--seed", type=int, default=None)
    pt.add_argument("--epochs", type=int, default=None)
    pt.add_argument("--batch-size", type=int, default=None)
    pt.add_argument("--no-sign-flip", action="store_true")
    pt.add_argument("--no-random-offset", action="store_true")
    pt.add_argument("--non-strict", action="store_true",
                    help="allow architectures outside the published trio")
    pt.add_argument("--out", dest="out_dir", default=None)
    pt.set_defaults(func=cmd_train)

    pe = sub.add_parser("eval", help="metrics report for a checkpoint on a split")
    pe.add_argument("--checkpoint", required=True)
    pe.add_argument("--manifest", default=None)
    pe.add_argument("--config", default=None)
    pe.add_argument("--split-file", required=True)
    pe.add_argument("--scale-file", required=True)
    pe.add_argument("--split", default="test", choices=data.SPLITS)
    pe.add_argument("--out", default=None)
    pe.add_argument("--predictions-csv", default=None)
    pe.set_defaults(func=cmd_eval)

    pd = sub.add_parser("predict", help="classify one raw signal payload")
    pd.add_argument("--checkpoint", required=True)
    pd.add_argument("--signal", required=True)
    pd.add_argument("--scale", type=float, default=None)
    pd.set_defaults(func=cmd_predict)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except (data.LoadError, ConfigurationError, FileNotFoundError, ValueError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return 2
    except NumericError as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
