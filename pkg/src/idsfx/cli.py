"""Command-line front end.

Subcommands: inspect, fit, transform, evaluate, corr, chi2.  Runs are driven
by a JSON config file (--config) with CLI flags overriding file values; the
fully resolved config is echoed into the output directory so every run can be
replayed.  Exit codes: 0 success, 2 usage/config error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classifiers import ALGORITHMS
from .data import ColumnKind, Dataset, load_csv, split_xy
from .errors import ConfigError, DatasetError, IdsfxError
from .evaluate import CorrMatrix, export_report, pearson_corr
from .pipeline import (PipelineConfig, pipeline_fit, pipeline_load,
                       pipeline_save, pipeline_transform)
from .preprocess import describe, encode_labels
from .runner import baseline_fit, baseline_transform, run_evaluation
from .select import chi2_scores, report_to_csv, select_k_best

log = logging.getLogger(__name__)


@dataclass
class RunConfig:
    dataset: str = ""
    profile: str = "generic"
    out: str = "runs/out"
    seed: int = 0
    test_fraction: float = 0.25
    classifiers: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)

    def to_dict(self) -> dict:
        return {"dataset": self.dataset, "profile": self.profile,
                "out": self.out, "seed": self.seed,
                "test_fraction": self.test_fraction,
                "classifiers": self.classifiers,
                "pipeline": self.pipeline.to_dict()}


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        cfg.dataset = doc.get("dataset", cfg.dataset)
        cfg.profile = doc.get("profile", cfg.profile)
        cfg.out = doc.get("out", cfg.out)
        cfg.seed = int(doc.get("seed", cfg.seed))
        cfg.test_fraction = float(doc.get("test_fraction", cfg.test_fraction))
        cfg.classifiers = list(doc.get("classifiers", cfg.classifiers))
        cfg.pipeline = PipelineConfig.from_dict(doc.get("pipeline", {}))

    if getattr(args, "dataset", None):
        cfg.dataset = args.dataset
    if getattr(args, "profile", None):
        cfg.profile = args.profile
    if getattr(args, "out", None):
        cfg.out = args.out
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "test_fraction", None) is not None:
        cfg.test_fraction = args.test_fraction
    if getattr(args, "components", None) is not None:
        cfg.pipeline.u = args.components
    if getattr(args, "select", None) is not None:
        cfg.pipeline.v = args.select
    if getattr(args, "threshold", None) is not None:
        cfg.pipeline.drop_threshold = args.threshold
    if getattr(args, "no_tfidf", False):
        cfg.pipeline.tfidf_enabled = False
    cfg.pipeline.seed = cfg.seed
    if not cfg.dataset:
        raise ConfigError("no dataset given; use --dataset or a config file")
    cfg.pipeline.validate()
    return cfg


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "run_config.json").write_text(
        json.dumps(cfg.to_dict(), sort_keys=True, indent=1) + "\n", encoding="utf-8")
    return out


def _load(cfg: RunConfig) -> Dataset:
    return load_csv(cfg.dataset, cfg.profile)


def cmd_inspect(args) -> int:
    d = load_csv(args.dataset, args.profile or "generic")
    print(f"rows: {d.n_rows}")
    label = d.label_column
    if label is not None:
        tokens = d.columns[label].astype(str)
        classes, counts = np.unique(tokens, return_counts=True)
        print(f"label column: {label}")
        print(f"classes: {classes.size}")
        order = np.argsort(-counts, kind="stable")
        for i in order:
            print(f"  {classes[i]}: {counts[i]}")
    x = d if label is None else split_xy(d)[0]
    stats = describe(x)
    print("columns:")
    for spec in x.schema:
        if spec.kind == ColumnKind.NUMERIC:
            s = stats.numeric[spec.name]
            print(f"  {spec.name} numeric count={s['count']:.0f} mean={s['mean']:.6g} "
                  f"std={s['std']:.6g} min={s['min']:.6g} max={s['max']:.6g} "
                  f"missing={s['missing']:.0f}")
        elif spec.kind == ColumnKind.CATEGORICAL:
            s = stats.categorical[spec.name]
            print(f"  {spec.name} categorical distinct={s['distinct']:.0f} "
                  f"missing={s['missing']:.0f}")
    return 0


def cmd_fit(args) -> int:
    cfg = _resolve_config(args)
    out = _out_dir(cfg)
    d = _load(cfg)
    fp, _, _ = pipeline_fit(d, cfg.pipeline)
    pipeline_save(fp, out / "pipeline.json")
    report_to_csv(fp.chi2, out / "chi2_scores.csv")
    (out / "fit_log.json").write_text(json.dumps({
        "objective_trace": fp.nmf.objective_trace,
        "iterations_run": fp.nmf.iterations_run,
        "converged": fp.nmf.converged,
    }, sort_keys=True, indent=1) + "\n", encoding="utf-8")
    print(f"pipeline written to {out / 'pipeline.json'}")
    return 0


def cmd_transform(args) -> int:
    fp = pipeline_load(args.pipeline)
    d = load_csv(args.dataset, args.profile or "generic")
    fm = pipeline_transform(fp, d)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    path = out / "transformed.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(fm.names) + "\n")
        for row in fm.values:
            fh.write(",".join("%.17g" % v for v in row) + "\n")
    print(f"transformed matrix written to {path}")
    return 0


def cmd_evaluate(args) -> int:
    cfg = _resolve_config(args)
    out = _out_dir(cfg)
    d = _load(cfg)
    report, fp, timings = run_evaluation(
        d, cfg.pipeline, algorithms=cfg.classifiers,
        test_fraction=cfg.test_fraction, seed=cfg.seed,
        dataset_id=Path(cfg.dataset).name)
    pipeline_save(fp, out / "pipeline.json")
    export_report(report, out / "report.csv", fmt="csv")
    export_report(report, out / "report.json", fmt="json")
    # wall-clock timings are inherently non-reproducible; sidecar file keeps
    # report files byte-identical across reruns
    (out / "timings.json").write_text(
        json.dumps(timings, sort_keys=True, indent=1) + "\n", encoding="utf-8")
    for clf_name in sorted(report.accuracies):
        for variant in sorted(report.accuracies[clf_name]):
            print(f"{clf_name}/{variant}: accuracy "
                  f"{report.accuracies[clf_name][variant]:.4f}")
    return 0


def cmd_corr(args) -> int:
    cfg = _resolve_config(args)
    out = _out_dir(cfg)
    d = _load(cfg)
    x, _ = split_xy(d)
    bm = baseline_fit(x)
    before = pearson_corr(baseline_transform(bm, x))
    export_report(before, out / "corr_before.csv", fmt="csv")
    if getattr(args, "pipeline", None):
        fp = pipeline_load(args.pipeline)
    else:
        fp, _, _ = pipeline_fit(d, cfg.pipeline)
    after = pearson_corr(pipeline_transform(fp, x))
    export_report(after, out / "corr_after.csv", fmt="csv")
    print(f"correlation tables written to {out}")
    return 0


def cmd_chi2(args) -> int:
    cfg = _resolve_config(args)
    out = _out_dir(cfg)
    d = _load(cfg)
    x, yv = split_xy(d)
    bm = baseline_fit(x)
    fm = baseline_transform(bm, x)
    codes, _ = encode_labels(yv)
    scores = chi2_scores(fm, codes)
    report = select_k_best(scores, len(fm.names), names=fm.names)
    report_to_csv(report, out / "chi2_raw.csv")
    print(f"raw-feature chi-square scores written to {out / 'chi2_raw.csv'}")
    return 0


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run-config file")
    p.add_argument("--dataset", help="dataset CSV path")
    p.add_argument("--profile", choices=["nsl-kdd", "cicids2017", "military-kaggle", "generic"])
    p.add_argument("--components", type=int, metavar="U", help="NMF component count")
    p.add_argument("--select", type=int, metavar="V", help="selected feature count")
    p.add_argument("--seed", type=int)
    p.add_argument("--test-fraction", type=float, dest="test_fraction")
    p.add_argument("--out", help="output directory")
    p.add_argument("--threshold", type=float, help="near-zero-mean drop threshold")
    p.add_argument("--no-tfidf", action="store_true", dest="no_tfidf")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="idsfx",
        description="Feature extraction and classification for intrusion-detection datasets")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="summarize a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--profile", choices=["nsl-kdd", "cicids2017", "military-kaggle", "generic"])
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("fit", help="fit the extraction pipeline")
    _add_config_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("transform", help="apply a saved pipeline to new rows")
    p.add_argument("--pipeline", required=True, help="saved pipeline file")
    p.add_argument("--dataset", required=True)
    p.add_argument("--profile", choices=["nsl-kdd", "cicids2017", "military-kaggle", "generic"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("evaluate", help="train classifiers on baseline and extracted features")
    _add_config_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("corr", help="export before/after correlation matrices")
    _add_config_flags(p)
    p.add_argument("--pipeline", help="reuse a saved pipeline instead of fitting")
    p.set_defaults(func=cmd_corr)

    p = sub.add_parser("chi2", help="raw-feature chi-square score table")
    _add_config_flags(p)
    p.set_defaults(func=cmd_chi2)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if "empty dataset" in str(exc) else 1
    except IdsfxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
