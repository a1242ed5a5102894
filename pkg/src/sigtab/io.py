"""File contracts: delimited text schemas, provenance, atomic writes.

Every artifact is a UTF-8 comma-separated file with a header row, ISO-8601
dates, decimal-point numerics, and floats printed to 12 significant digits
(missing cells are empty fields).  The first physical line is a provenance
comment embedding the config digest and the sha256 of each input, so any
stage can refuse inputs produced under a different configuration.  Writes
go to a temp file in the target directory and are renamed into place.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import InvalidInputError, IOStageError, SchemaError

PROVENANCE_PREFIX = "# sigtab "
FLOAT_FORMAT = "%.12g"
_IDENTIFIER = re.compile(r"^[A-Za-z0-9._-]+$")
_ISO_DATE = re.compile(r"^\d{4}-\d{2}-\d{2}$")


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str  # 'id' | 'date' | 'float' | 'int'
    min_value: float | None = None
    max_value: float | None = None


@dataclass(frozen=True)
class FileSchema:
    name: str
    columns: tuple[ColumnSpec, ...]
    extra_float_prefixes: tuple[str, ...] = ()  # wildcard feature columns
    require_extra: bool = False

    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]


PRICES_SCHEMA = FileSchema(
    "prices",
    (
        ColumnSpec("asset_id", "id"),
        ColumnSpec("date", "date"),
        ColumnSpec("open", "float", min_value=0.0),
        ColumnSpec("high", "float", min_value=0.0),
        ColumnSpec("low", "float", min_value=0.0),
        ColumnSpec("close", "float", min_value=0.0),
    ),
)

EVENTS_SCHEMA = FileSchema(
    "events",
    (
        ColumnSpec("asset_id", "id"),
        ColumnSpec("date", "date"),
        ColumnSpec("relevance", "int", min_value=0, max_value=100),
        ColumnSpec("similar_days", "float", min_value=0.0),
        ColumnSpec("sentiment", "float", min_value=-1.0, max_value=1.0),
        ColumnSpec("category", "id"),
    ),
)

FINANCIALS_SCHEMA = FileSchema(
    "financials",
    (
        ColumnSpec("asset_id", "id"),
        ColumnSpec("month_end", "date"),
    ),
    extra_float_prefixes=("fin.",),
    require_extra=True,
)

UNIVERSE_SCHEMA = FileSchema(
    "universe",
    (
        ColumnSpec("week", "date"),
        ColumnSpec("asset_id", "id"),
    ),
)

TARGETS_SCHEMA = FileSchema(
    "targets",
    (
        ColumnSpec("week", "date"),
        ColumnSpec("asset_id", "id"),
        ColumnSpec("target", "float", min_value=0.0, max_value=1.0),
    ),
)

FEATURES_SCHEMA = FileSchema(
    "features",
    (
        ColumnSpec("week", "date"),
        ColumnSpec("asset_id", "id"),
    ),
    extra_float_prefixes=("stats.", "catch22.", "signature.", "sentiment.", "fin."),
    require_extra=True,
)

PREDICTIONS_SCHEMA = FileSchema(
    "predictions",
    (
        ColumnSpec("week", "date"),
        ColumnSpec("asset_id", "id"),
        ColumnSpec("score", "float"),
    ),
)


def file_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def make_provenance(config_digest: str, inputs: dict[str, str]) -> dict:
    return {
        "format_version": 1,
        "config_digest": config_digest,
        "inputs": {role: file_digest(path) for role, path in sorted(inputs.items())},
    }


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".sigtab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_table(df: pd.DataFrame, provenance: dict | None = None) -> str:
    """Deterministic text rendering: provenance line, header, data rows."""
    lines = []
    if provenance is not None:
        lines.append(PROVENANCE_PREFIX + json.dumps(provenance, sort_keys=True, separators=(",", ":")))
    lines.append(",".join(df.columns))
    float_cols = {c for c in df.columns if pd.api.types.is_float_dtype(df[c])}
    int_cols = {c for c in df.columns if pd.api.types.is_integer_dtype(df[c])}
    for row in df.itertuples(index=False):
        cells = []
        for col, value in zip(df.columns, row):
            if col in float_cols:
                cells.append("" if pd.isna(value) else FLOAT_FORMAT % value)
            elif col in int_cols:
                cells.append(str(int(value)))
            else:
                cells.append("" if pd.isna(value) else str(value))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_table(path: str, df: pd.DataFrame, provenance: dict | None = None) -> None:
    atomic_write_text(path, format_table(df, provenance))


def read_provenance(path: str) -> dict | None:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
    if first.startswith(PROVENANCE_PREFIX):
        return json.loads(first[len(PROVENANCE_PREFIX):])
    return None


def read_table(path: str, schema: FileSchema | None = None) -> tuple[pd.DataFrame, dict | None]:
    """Read a delimited artifact, validate against its schema if given.

    Key/date columns come back as strings (ISO dates), numerics as floats.
    Schema violations raise SchemaError with 1-based physical line numbers.
    """
    if not os.path.exists(path):
        raise IOStageError(f"missing input file: {path}")
    provenance = read_provenance(path)
    offset = 2 + (1 if provenance is not None else 0)  # first data row's line number
    try:
        df = pd.read_csv(
            path, comment="#", dtype=str, keep_default_na=False, na_values=[""], skip_blank_lines=False
        )
    except Exception as exc:
        raise SchemaError(path, [(1, f"unparseable file: {exc}")]) from exc
    if schema is not None:
        df = _validate(path, df, schema, offset)
    return df, provenance


def _validate(path: str, df: pd.DataFrame, schema: FileSchema, offset: int) -> pd.DataFrame:
    errors: list[tuple[int, str]] = []
    declared = schema.column_names()
    missing = [c for c in declared if c not in df.columns]
    if missing:
        raise SchemaError(path, [(offset - 1, f"missing required columns {missing}")])
    extras = [c for c in df.columns if c not in declared]
    for c in extras:
        if not schema.extra_float_prefixes or not c.startswith(schema.extra_float_prefixes):
            raise SchemaError(path, [(offset - 1, f"unexpected column '{c}' for a {schema.name} file")])
    if schema.require_extra and not extras:
        raise SchemaError(path, [(offset - 1, f"a {schema.name} file needs at least one value column")])

    out = pd.DataFrame(index=df.index)
    for spec in schema.columns:
        col = df[spec.name]
        if spec.kind in ("id", "date"):
            pattern = _IDENTIFIER if spec.kind == "id" else _ISO_DATE
            bad = col.isna() | ~col.fillna("").str.match(pattern)
            for i in np.flatnonzero(bad.to_numpy())[:20]:
                errors.append((offset + int(i), f"column '{spec.name}': invalid {spec.kind} {col.iloc[i]!r}"))
            out[spec.name] = col
        else:
            numeric = pd.to_numeric(col, errors="coerce")
            bad = numeric.isna() & ~col.isna()
            if spec.kind == "int":
                bad |= col.isna() | (numeric.notna() & (numeric != numeric.round()))
            if spec.min_value is not None:
                bad |= numeric < spec.min_value
            if spec.max_value is not None:
                bad |= numeric > spec.max_value
            for i in np.flatnonzero(bad.to_numpy())[:20]:
                errors.append((offset + int(i), f"column '{spec.name}': bad value {col.iloc[i]!r}"))
            out[spec.name] = numeric.astype(int if spec.kind == "int" and not bad.any() else float)
    for c in extras:
        numeric = pd.to_numeric(df[c], errors="coerce")
        bad = numeric.isna() & ~df[c].isna()
        for i in np.flatnonzero(bad.to_numpy())[:20]:
            errors.append((offset + int(i), f"column '{c}': bad numeric {df[c].iloc[i]!r}"))
        out[c] = numeric
    if errors:
        raise SchemaError(path, sorted(errors)[:50])
    return out


def check_provenance(path: str, provenance: dict | None, config_digest: str, force: bool) -> None:
    """Refuse inputs produced under a different config unless forced."""
    if provenance is None or force:
        return
    found = provenance.get("config_digest")
    if found is not None and found != config_digest:
        raise InvalidInputError(
            f"{path}: produced with config digest {found[:12]}..., current is "
            f"{config_digest[:12]}... (use --force to override)"
        )
