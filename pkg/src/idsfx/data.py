"""Dataset loading, schema handling and deterministic splitting.

Supported inputs are comma-delimited CSV files from three intrusion-detection
dataset families (NSL-KDD, CICIDS-2017, the Kaggle military-environment dump)
plus a header-driven generic profile.  Numeric cells are stored as float64
with NaN standing for the explicit Missing state; the recognized missing
markers are "", "nan", "infinity" and "-infinity" (case-insensitive).
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import ConfigError, DatasetError, SchemaError

log = logging.getLogger(__name__)

MISSING_MARKERS = frozenset({"", "nan", "infinity", "-infinity", "+infinity", "inf", "-inf"})

# Canonical 41 NSL-KDD / KDD'99 connection features, in file order.
KDD_FEATURES = [
    "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes",
    "land", "wrong_fragment", "urgent", "hot", "num_failed_logins", "logged_in",
    "num_compromised", "root_shell", "su_attempted", "num_root",
    "num_file_creations", "num_shells", "num_access_files", "num_outbound_cmds",
    "is_host_login", "is_guest_login", "count", "srv_count", "serror_rate",
    "srv_serror_rate", "rerror_rate", "srv_rerror_rate", "same_srv_rate",
    "diff_srv_rate", "srv_diff_host_rate", "dst_host_count",
    "dst_host_srv_count", "dst_host_same_srv_rate", "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate", "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate", "dst_host_srv_serror_rate", "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
]
KDD_CATEGORICAL = frozenset({"protocol_type", "service", "flag"})


class ColumnKind(Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"
    LABEL = "label"
    IGNORED = "ignored"


class Profile(Enum):
    NSL_KDD = "nsl-kdd"
    CICIDS2017 = "cicids2017"
    MILITARY_KAGGLE = "military-kaggle"
    GENERIC = "generic"


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: ColumnKind


@dataclass
class Dataset:
    """Immutable-by-convention tabular container.

    ``columns`` maps column name to a float64 array (numeric, NaN = missing)
    or an object array of str (categorical / label).
    """

    schema: list[ColumnSpec] = field(default_factory=list)
    columns: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def n_rows(self) -> int:
        for spec in self.schema:
            return len(self.columns[spec.name])
        return 0

    def spec_for(self, name: str) -> ColumnSpec:
        for spec in self.schema:
            if spec.name == name:
                return spec
        raise SchemaError(f"no column named {name!r}")

    def specs(self, kind: ColumnKind) -> list[ColumnSpec]:
        return [s for s in self.schema if s.kind == kind]

    @property
    def label_column(self) -> str | None:
        labels = self.specs(ColumnKind.LABEL)
        return labels[0].name if labels else None

    def feature_names(self) -> list[str]:
        return [s.name for s in self.schema
                if s.kind in (ColumnKind.NUMERIC, ColumnKind.CATEGORICAL)]

    def subset(self, row_idx: np.ndarray) -> "Dataset":
        cols = {s.name: self.columns[s.name][row_idx] for s in self.schema}
        return Dataset(schema=list(self.schema), columns=cols)

    def to_csv(self, path: str | Path) -> None:
        """Write the table back out with a header row; missing cells are empty."""
        names = [s.name for s in self.schema]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(names)
            for i in range(self.n_rows):
                row = []
                for spec in self.schema:
                    v = self.columns[spec.name][i]
                    if spec.kind == ColumnKind.NUMERIC:
                        if np.isnan(v):
                            row.append("")
                        elif v == int(v) and abs(v) < 1e15:
                            row.append(str(int(v)))
                        else:
                            row.append(repr(float(v)))
                    else:
                        row.append(str(v))
                writer.writerow(row)


@dataclass
class LabelVector:
    values: np.ndarray  # object array of str tokens

    def __len__(self) -> int:
        return len(self.values)


def _is_missing(token: str) -> bool:
    return token.strip().lower() in MISSING_MARKERS


def _parse_numeric(token: str) -> float:
    token = token.strip()
    if _is_missing(token):
        return float("nan")
    try:
        v = float(token)
    except ValueError as exc:
        raise DatasetError(f"cell {token!r} is not numeric") from exc
    if not np.isfinite(v):
        return float("nan")
    return v


def _read_rows(path: str | Path) -> list[list[str]]:
    p = Path(path)
    if not p.exists():
        raise DatasetError(f"no such file: {p}")
    raw = p.read_bytes()
    if not raw.strip():
        raise DatasetError(f"empty dataset: {p}")
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DatasetError(
            f"{p}: not valid UTF-8 at byte offset {exc.start}") from exc
    rows = [row for row in csv.reader(text.splitlines()) if row]
    if not rows:
        raise DatasetError(f"empty dataset: {p}")
    return rows


def _kdd_schema(n_cols: int) -> list[ColumnSpec]:
    specs = [
        ColumnSpec(n, ColumnKind.CATEGORICAL if n in KDD_CATEGORICAL else ColumnKind.NUMERIC)
        for n in KDD_FEATURES
    ]
    specs.append(ColumnSpec("label", ColumnKind.LABEL))
    if n_cols == len(KDD_FEATURES) + 2:
        # trailing difficulty column present in KDDTrain+ style files
        specs.append(ColumnSpec("difficulty", ColumnKind.IGNORED))
    elif n_cols != len(KDD_FEATURES) + 1:
        raise SchemaError(
            f"expected {len(KDD_FEATURES) + 1} or {len(KDD_FEATURES) + 2} "
            f"columns for this profile, found {n_cols}")
    return specs


_LABEL_NAMES = ("label", "class", "target", "labels")


def _generic_schema(header: list[str], rows: list[list[str]],
                    overrides: dict | None) -> list[ColumnSpec]:
    overrides = overrides or {}
    names = [h.strip() for h in header]
    if len(set(names)) != len(names):
        raise SchemaError(f"duplicate column names in header: {names}")
    label_col = overrides.get("label_column")
    if label_col is None:
        for n in names:
            if n.lower() in _LABEL_NAMES:
                label_col = n
                break
    if label_col is None or label_col not in names:
        raise SchemaError("no resolvable label column; pass overrides={'label_column': ...}")
    forced_cat = set(overrides.get("categorical", ()))
    ignored = set(overrides.get("ignored", ()))
    specs = []
    for j, n in enumerate(names):
        if n == label_col:
            specs.append(ColumnSpec(n, ColumnKind.LABEL))
        elif n in ignored:
            specs.append(ColumnSpec(n, ColumnKind.IGNORED))
        elif n in forced_cat:
            specs.append(ColumnSpec(n, ColumnKind.CATEGORICAL))
        else:
            numeric = True
            for row in rows:
                tok = row[j].strip()
                if _is_missing(tok):
                    continue
                try:
                    float(tok)
                except ValueError:
                    numeric = False
                    break
            specs.append(ColumnSpec(n, ColumnKind.NUMERIC if numeric else ColumnKind.CATEGORICAL))
    return specs


def load_csv(path: str | Path, profile: Profile | str,
             overrides: dict | None = None) -> Dataset:
    """Load a CSV file under the schema rules of the given profile.

    NSL-KDD / MilitaryKaggle files carry the 41 canonical connection features
    plus label (plus an optional trailing difficulty column, marked Ignored);
    a header row is detected and skipped when present.  CICIDS-2017 files are
    header-driven with surrounding whitespace trimmed from names and the
    "Label" column designated as the label.  Generic requires a header.
    """
    if isinstance(profile, str):
        try:
            profile = Profile(profile)
        except ValueError as exc:
            raise ConfigError(f"unknown profile {profile!r}") from exc
    rows = _read_rows(path)

    if profile in (Profile.NSL_KDD, Profile.MILITARY_KAGGLE):
        first = rows[0][0].strip().lower()
        if first == KDD_FEATURES[0]:  # header present
            rows = rows[1:]
            if not rows:
                raise DatasetError(f"empty dataset: {path}")
        schema = _kdd_schema(len(rows[0]))
    elif profile is Profile.CICIDS2017:
        header = [h.strip() for h in rows[0]]
        specs = []
        label_seen = False
        for n in header:
            if n.lower() == "label" and not label_seen:
                specs.append(ColumnSpec(n, ColumnKind.LABEL))
                label_seen = True
            else:
                specs.append(ColumnSpec(n, ColumnKind.NUMERIC))
        if not label_seen:
            raise SchemaError("CICIDS file has no 'Label' column")
        schema = specs
        rows = rows[1:]
        if not rows:
            raise DatasetError(f"empty dataset: {path}")
    else:  # Generic
        if len(rows) < 2:
            raise DatasetError("generic profile requires a header row and at least one data row")
        schema = _generic_schema(rows[0], rows[1:], overrides)
        rows = rows[1:]

    n_cols = len(schema)
    raw_cols: list[list] = [[] for _ in range(n_cols)]
    for i, row in enumerate(rows):
        if len(row) != n_cols:
            raise DatasetError(
                f"row {i}: expected {n_cols} cells, found {len(row)}")
        for j, tok in enumerate(row):
            raw_cols[j].append(tok)

    columns: dict[str, np.ndarray] = {}
    for j, spec in enumerate(schema):
        if spec.kind == ColumnKind.NUMERIC:
            try:
                columns[spec.name] = np.array(
                    [_parse_numeric(t) for t in raw_cols[j]], dtype=np.float64)
            except DatasetError as exc:
                raise DatasetError(f"column {spec.name!r}: {exc}") from exc
        else:
            vals = [t.strip() for t in raw_cols[j]]
            if spec.kind == ColumnKind.LABEL and any(_is_missing(v) for v in vals):
                raise DatasetError(f"missing label in column {spec.name!r}")
            columns[spec.name] = np.array(vals, dtype=object)
    return Dataset(schema=schema, columns=columns)


def split_xy(d: Dataset) -> tuple[Dataset, LabelVector]:
    """Separate features from labels; Ignored columns are dropped."""
    label = d.label_column
    if label is None:
        raise SchemaError("dataset has no label column")
    keep = [s for s in d.schema if s.kind in (ColumnKind.NUMERIC, ColumnKind.CATEGORICAL)]
    x = Dataset(schema=keep, columns={s.name: d.columns[s.name] for s in keep})
    return x, LabelVector(values=d.columns[label])


def _labels_of(d: Dataset) -> np.ndarray | None:
    label = d.label_column
    return None if label is None else d.columns[label]


def train_test_split(d: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Deterministic train/test partition, stratified by label when possible.

    Stratification requires every class to have at least 2 members; otherwise
    a plain seeded shuffle is used and a warning is logged.
    """
    if not (0.0 < test_fraction < 1.0):
        raise ConfigError(f"test_fraction must be in (0,1), got {test_fraction}")
    n = d.n_rows
    if n < 2:
        raise DatasetError("need at least 2 rows to split")
    rng = np.random.default_rng(seed)
    labels = _labels_of(d)

    stratify = False
    if labels is not None:
        _, counts = np.unique(labels.astype(str), return_counts=True)
        stratify = bool(counts.min() >= 2)
        if not stratify:
            log.warning("some class has fewer than 2 members; falling back to plain shuffle")

    if stratify:
        test_parts = []
        keys = labels.astype(str)
        for cls in sorted(set(keys)):
            idx = np.flatnonzero(keys == cls)
            idx = rng.permutation(idx)
            k = int(round(test_fraction * len(idx)))
            k = min(max(k, 1), len(idx) - 1)
            test_parts.append(idx[:k])
        test_idx = np.sort(np.concatenate(test_parts))
    else:
        perm = rng.permutation(n)
        k = int(round(test_fraction * n))
        k = min(max(k, 1), n - 1)
        test_idx = np.sort(perm[:k])

    mask = np.zeros(n, dtype=bool)
    mask[test_idx] = True
    train_idx = np.flatnonzero(~mask)
    return d.subset(train_idx), d.subset(test_idx)
