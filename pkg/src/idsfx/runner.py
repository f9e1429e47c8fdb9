"""Dual-variant evaluation: every classifier is trained on the raw
preprocessed features (baseline) and on the pipeline-extracted features over
the same split and seed, so the reported accuracy delta is apples-to-apples.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np

from . import classifiers as clf
from .data import Dataset, split_xy, train_test_split
from .evaluate import EvalReport, accuracy, confusion
from .matrix import FeatureMatrix
from .pipeline import FittedPipeline, PipelineConfig, pipeline_fit, pipeline_transform
from .preprocess import (CategoricalEncoder, ImputeModel, encode_categoricals,
                         impute_apply, impute_fit)

log = logging.getLogger(__name__)


@dataclass
class BaselineModel:
    """Imputation + ordinal encoding only: the pre-extraction feature space."""
    impute: ImputeModel
    cat_encoder: CategoricalEncoder


def baseline_fit(x_train: Dataset) -> BaselineModel:
    imp = impute_fit(x_train)
    _, enc = encode_categoricals(impute_apply(imp, x_train))
    return BaselineModel(impute=imp, cat_encoder=enc)


def baseline_transform(bm: BaselineModel, x: Dataset) -> FeatureMatrix:
    fm, _ = encode_categoricals(impute_apply(bm.impute, x), bm.cat_encoder)
    return fm


def run_evaluation(d: Dataset, cfg: PipelineConfig,
                   algorithms: list[str] | None = None,
                   test_fraction: float = 0.25, seed: int = 0,
                   dataset_id: str = "dataset"
                   ) -> tuple[EvalReport, FittedPipeline, dict[str, float]]:
    """Train/score every classifier twice (baseline vs extracted features).

    Returns the report, the fitted pipeline and the wall-clock timings.
    Timings live outside the report so report files stay byte-reproducible.
    """
    algorithms = sorted(algorithms if algorithms is not None else clf.ALGORITHMS)
    for a in algorithms:
        if a not in clf.ALGORITHMS:
            from .errors import ConfigError
            raise ConfigError(f"unknown classifier {a!r}")
    cfg.validate()
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    train_d, test_d = train_test_split(d, test_fraction, seed)
    x_train, y_train_v = split_xy(train_d)
    x_test, y_test_v = split_xy(test_d)

    fp, x_train_ext, y_train = pipeline_fit(train_d, cfg)
    y_test = fp.label_encoder.encode(y_test_v.values)
    x_test_ext = pipeline_transform(fp, x_test)
    timings["pipeline_fit"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    bm = baseline_fit(x_train)
    x_train_base = baseline_transform(bm, x_train)
    x_test_base = baseline_transform(bm, x_test)
    timings["baseline_fit"] = time.perf_counter() - t0

    k = len(fp.label_encoder.classes)
    report = EvalReport(dataset_id=dataset_id, config=cfg.to_dict())
    variants = {
        "baseline": (x_train_base, x_test_base),
        "extracted": (x_train_ext, x_test_ext),
    }
    for algo in algorithms:
        report.accuracies[algo] = {}
        report.confusions[algo] = {}
        for variant in sorted(variants):
            xtr, xte = variants[variant]
            t0 = time.perf_counter()
            model = clf.train(clf.ClassifierSpec(algorithm=algo, seed=seed),
                              xtr, y_train)
            pred = clf.predict(model, xte)
            timings[f"{algo}/{variant}"] = time.perf_counter() - t0
            acc = accuracy(pred, y_test)
            report.accuracies[algo][variant] = acc
            report.confusions[algo][variant] = confusion(pred, y_test, k).tolist()
            log.info("%s/%s: accuracy %.4f", algo, variant, acc)
    return report, fp, timings
