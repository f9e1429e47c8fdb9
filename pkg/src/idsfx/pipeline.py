"""End-to-end fit/transform pipeline with single-file JSON persistence.

Stage order is fixed: describe -> drop near-zero-mean -> impute -> encode ->
TF-IDF -> NMF (U components) -> chi-square select (V features).  The
chi-square stage is supervised, so labels are consumed at fit time only;
transform applies every fitted stage without refitting.

The persisted file is one JSON document with full-precision floats followed
by a trailing CRC-32 checksum line.
"""

from __future__ import annotations

import hashlib
import json
import zlib
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .data import ColumnKind, Dataset, split_xy
from .errors import ConfigError, IdsfxError, IntegrityError, PipelineError, SchemaError, VersionError
from .matrix import FeatureMatrix
from .nmf import NmfConfig, NmfModel, nmf_fit, nmf_transform
from .preprocess import (CategoricalEncoder, ImputeModel, LabelEncoder,
                         TfidfModel, describe, drop_near_zero_mean,
                         encode_categoricals, encode_labels, impute_apply,
                         impute_fit, tfidf_apply, tfidf_fit)
from .select import Chi2Report, apply_selection, chi2_scores, select_k_best

FORMAT_VERSION = "1.0"


@dataclass
class PipelineConfig:
    u: int = 30                    # NMF component count
    v: int = 20                    # univariate-selected feature count
    drop_threshold: float = 0.01
    tfidf_enabled: bool = True
    nmf: NmfConfig = field(default_factory=NmfConfig)
    seed: int = 0

    def validate(self) -> None:
        if self.u < 1:
            raise ConfigError("U must be >= 1")
        if not (1 <= self.v <= self.u):
            raise ConfigError(f"V must satisfy 1 <= V <= U, got V={self.v}, U={self.u}")
        if self.drop_threshold < 0:
            raise ConfigError("drop_threshold must be >= 0")

    def to_dict(self) -> dict:
        return {
            "u": self.u, "v": self.v, "drop_threshold": self.drop_threshold,
            "tfidf_enabled": self.tfidf_enabled, "seed": self.seed,
            "nmf": {"r": self.nmf.r, "init": self.nmf.init,
                    "max_iter": self.nmf.max_iter, "tol": self.nmf.tol,
                    "seed": self.nmf.seed},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        nmf = d.get("nmf", {})
        return cls(u=d.get("u", 30), v=d.get("v", 20),
                   drop_threshold=d.get("drop_threshold", 0.01),
                   tfidf_enabled=d.get("tfidf_enabled", True),
                   seed=d.get("seed", 0),
                   nmf=NmfConfig(r=nmf.get("r", 30), init=nmf.get("init", "random"),
                                 max_iter=nmf.get("max_iter", 200),
                                 tol=nmf.get("tol", 1e-4), seed=nmf.get("seed", 0)))


def _schema_pairs(x: Dataset) -> list[list[str]]:
    return [[s.name, s.kind.value] for s in x.schema]


def _fingerprint(x: Dataset) -> dict:
    pairs = _schema_pairs(x)
    digest = hashlib.sha256(json.dumps(pairs).encode()).hexdigest()[:16]
    return {"rows": x.n_rows, "columns": len(pairs),
            "schema": pairs, "schema_hash": digest}


@dataclass
class FittedPipeline:
    config: PipelineConfig
    fingerprint: dict
    dropped_columns: list[str]
    impute: ImputeModel
    cat_encoder: CategoricalEncoder
    label_encoder: LabelEncoder
    tfidf: TfidfModel | None
    nmf: NmfModel
    chi2: Chi2Report
    format_version: str = FORMAT_VERSION


def _stage(name: str):
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, IdsfxError):
                raise PipelineError(f"stage {name!r}: {exc}") from exc
            return False
    return _Ctx()


def pipeline_fit(d: Dataset, cfg: PipelineConfig
                 ) -> tuple[FittedPipeline, FeatureMatrix, np.ndarray]:
    """Fit every stage in order; returns the fitted pipeline, the final
    rows x V matrix and the encoded labels."""
    cfg.validate()
    x, yv = split_xy(d)
    fingerprint = _fingerprint(x)

    with _stage("drop_near_zero_mean"):
        stats = describe(x)
        x, dropped = drop_near_zero_mean(x, stats, cfg.drop_threshold)
    with _stage("impute"):
        imp = impute_fit(x)
        x = impute_apply(imp, x)
    with _stage("encode_labels"):
        codes, label_enc = encode_labels(yv)
    with _stage("encode_categoricals"):
        fm, cat_enc = encode_categoricals(x)
    tfidf = None
    if cfg.tfidf_enabled:
        with _stage("tfidf"):
            tfidf = tfidf_fit(fm)
            fm = tfidf_apply(tfidf, fm)
    with _stage("nmf"):
        ncfg = replace(cfg.nmf, r=cfg.u, seed=cfg.seed)
        model = nmf_fit(fm, ncfg)
        w = nmf_transform(model, fm)
    with _stage("chi2_select"):
        scores = chi2_scores(w, codes)
        report = select_k_best(scores, cfg.v, names=w.names)
        final = apply_selection(report, w)

    fp = FittedPipeline(config=cfg, fingerprint=fingerprint,
                        dropped_columns=dropped, impute=imp,
                        cat_encoder=cat_enc, label_encoder=label_enc,
                        tfidf=tfidf, nmf=model, chi2=report)
    return fp, final, codes


def _check_schema(fp: FittedPipeline, x: Dataset) -> None:
    expected = [tuple(p) for p in fp.fingerprint["schema"]]
    got = [(s.name, s.kind.value) for s in x.schema]
    if expected != got:
        missing = [n for n, _ in expected if n not in {g for g, _ in got}]
        extra = [n for n, _ in got if n not in {e for e, _ in expected}]
        raise SchemaError(
            f"schema mismatch: missing columns {missing}, extra columns {extra}")


def pipeline_transform(fp: FittedPipeline, d: Dataset) -> FeatureMatrix:
    """Apply all fitted stages to a features-only dataset; output is rows x V."""
    if d.label_column is not None:
        d, _ = split_xy(d)
    _check_schema(fp, d)
    keep = [s for s in d.schema if s.name not in set(fp.dropped_columns)]
    x = Dataset(schema=keep, columns={s.name: d.columns[s.name] for s in keep})
    with _stage("impute"):
        x = impute_apply(fp.impute, x)
    with _stage("encode_categoricals"):
        fm, _ = encode_categoricals(x, fp.cat_encoder)
    if fp.tfidf is not None:
        with _stage("tfidf"):
            fm = tfidf_apply(fp.tfidf, fm)
    with _stage("nmf"):
        w = nmf_transform(fp.nmf, fm)
    with _stage("chi2_select"):
        return apply_selection(fp.chi2, w)


# ------------------------------------------------------------- persistence

def _floats(a: np.ndarray) -> list:
    return [float(v) for v in np.asarray(a).ravel()]


def _matrix_doc(a: np.ndarray) -> dict:
    return {"rows": int(a.shape[0]), "cols": int(a.shape[1]), "data": _floats(a)}


def _matrix_from_doc(doc: dict) -> np.ndarray:
    return np.array(doc["data"], dtype=np.float64).reshape(doc["rows"], doc["cols"])


def _to_doc(fp: FittedPipeline) -> dict:
    tfidf = None
    if fp.tfidf is not None:
        tfidf = {"idf": _floats(fp.tfidf.idf), "shifts": _floats(fp.tfidf.shifts),
                 "names": fp.tfidf.names, "l2_normalize": fp.tfidf.l2_normalize}
    return {
        "format_version": fp.format_version,
        "config": fp.config.to_dict(),
        "fingerprint": fp.fingerprint,
        "stages": {
            "dropped_columns": fp.dropped_columns,
            "impute_means": fp.impute.means,
            "categorical_tables": fp.cat_encoder.tables,
            "label_classes": fp.label_encoder.classes,
            "tfidf": tfidf,
            "nmf": {
                "w": _matrix_doc(fp.nmf.w), "h": _matrix_doc(fp.nmf.h),
                "r": fp.nmf.r, "objective_trace": _floats(np.array(fp.nmf.objective_trace)),
                "iterations_run": fp.nmf.iterations_run,
                "converged": fp.nmf.converged,
            },
            "chi2": {
                "scores": _floats(fp.chi2.scores),
                "ranking": [int(v) for v in fp.chi2.ranking],
                "selected": [int(v) for v in fp.chi2.selected],
                "k": fp.chi2.k, "names": fp.chi2.names,
            },
        },
    }


def _from_doc(doc: dict) -> FittedPipeline:
    cfg = PipelineConfig.from_dict(doc["config"])
    st = doc["stages"]
    tfidf = None
    if st["tfidf"] is not None:
        t = st["tfidf"]
        tfidf = TfidfModel(idf=np.array(t["idf"]), shifts=np.array(t["shifts"]),
                           names=list(t["names"]), l2_normalize=t["l2_normalize"])
    nd = st["nmf"]
    nmf = NmfModel(w=_matrix_from_doc(nd["w"]), h=_matrix_from_doc(nd["h"]),
                   r=nd["r"], objective_trace=list(nd["objective_trace"]),
                   iterations_run=nd["iterations_run"], converged=nd["converged"],
                   config=cfg.nmf)
    cd = st["chi2"]
    chi2 = Chi2Report(scores=np.array(cd["scores"]),
                      ranking=np.array(cd["ranking"], dtype=np.int64),
                      selected=np.array(cd["selected"], dtype=np.int64),
                      k=cd["k"], names=list(cd["names"]))
    return FittedPipeline(
        config=cfg, fingerprint=doc["fingerprint"],
        dropped_columns=list(st["dropped_columns"]),
        impute=ImputeModel(means=dict(st["impute_means"])),
        cat_encoder=CategoricalEncoder(
            tables={k: dict(v) for k, v in st["categorical_tables"].items()}),
        label_encoder=LabelEncoder(classes=list(st["label_classes"])),
        tfidf=tfidf, nmf=nmf, chi2=chi2,
        format_version=doc["format_version"])


def serialize_pipeline(fp: FittedPipeline) -> bytes:
    body = json.dumps(_to_doc(fp), sort_keys=True, separators=(",", ":"))
    crc = zlib.crc32(body.encode("utf-8")) & 0xFFFFFFFF
    return (body + "\ncrc32 %08x\n" % crc).encode("utf-8")


def pipeline_save(fp: FittedPipeline, path: str | Path) -> None:
    Path(path).write_bytes(serialize_pipeline(fp))


def pipeline_load(path: str | Path) -> FittedPipeline:
    try:
        text = Path(path).read_bytes().decode("utf-8")
    except UnicodeDecodeError as exc:
        raise IntegrityError(f"pipeline file is not valid UTF-8: {exc}") from exc
    stripped = text.rstrip("\n")
    if "\n" not in stripped:
        raise IntegrityError("truncated pipeline file (no checksum line)")
    body, crc_line = stripped.rsplit("\n", 1)
    if not crc_line.startswith("crc32 "):
        raise IntegrityError("pipeline file is missing its crc32 trailer")
    try:
        expected = int(crc_line.split()[1], 16)
    except (IndexError, ValueError) as exc:
        raise IntegrityError("malformed crc32 trailer") from exc
    actual = zlib.crc32(body.encode("utf-8")) & 0xFFFFFFFF
    if actual != expected:
        raise IntegrityError(
            f"checksum mismatch: file says {expected:08x}, content is {actual:08x}")
    doc = json.loads(body)
    version = doc.get("format_version", "")
    if version.split(".")[0] != FORMAT_VERSION.split(".")[0]:
        raise VersionError(
            f"pipeline file format {version!r} is not readable by "
            f"{FORMAT_VERSION!r} code; re-fit or upgrade")
    return _from_doc(doc)
