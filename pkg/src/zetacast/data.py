"""Macro data ingestion, validation and the log-level t transform."""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Literal, Mapping, Sequence

import numpy as np

DEFAULT_BETA = 0.1

MANDATORY = ("period", "gdp_real", "m3", "policy_rate")
OPTIONAL = ("exchange_rate", "reer", "unemployment", "wage", "inflation_actual")

_PERIOD_RE = re.compile(r"^\s*(\d{1,4})(?:\s*[-_ ]?\s*[Qq]([1-4]))?\s*$")


class DataError(ValueError):
    pass


class CsvParseError(DataError):
    pass


class ValidationError(DataError):
    pass


class DuplicatePeriodError(ValidationError):
    pass


def period_key(period: str) -> tuple[int, int]:
    """Sort key for a year (``2015``), index (``3``) or year-quarter (``2015Q2``)."""
    m = _PERIOD_RE.match(str(period))
    if m is None:
        raise CsvParseError(f"unrecognised period {period!r}")
    return int(m.group(1)), int(m.group(2) or 0)


@dataclass(frozen=True)
class MacroRecord:
    period: str
    gdp_real: float
    m3: float
    policy_rate: float
    exchange_rate: float | None = None
    reer: float | None = None
    unemployment: float | None = None
    wage: float | None = None
    inflation_actual: float | None = None

    def __post_init__(self) -> None:
        for name in ("gdp_real", "m3"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(f"period {self.period}: {name} must be positive, got {v}")
        if not math.isfinite(self.policy_rate):
            raise ValidationError(f"period {self.period}: policy_rate is not finite")


@dataclass(frozen=True)
class ShockAnnotation:
    period: str
    kind: Literal["domestic", "external"]
    label: str

    def __post_init__(self) -> None:
        if self.kind not in ("domestic", "external"):
            raise ValidationError(f"shock kind must be domestic or external, got {self.kind!r}")


@dataclass(frozen=True)
class MacroSeries:
    records: tuple[MacroRecord, ...]
    beta: float = DEFAULT_BETA
    shocks: tuple[ShockAnnotation, ...] = ()

    def __post_init__(self) -> None:
        if not self.records:
            raise ValidationError("no records")
        if not math.isfinite(self.beta):
            raise ValidationError(f"beta must be finite, got {self.beta}")
        keys = [period_key(r.period) for r in self.records]
        seen: dict[tuple[int, int], str] = {}
        for r, k in zip(self.records, keys):
            if k in seen:
                raise DuplicatePeriodError(f"duplicate period {r.period!r}")
            seen[k] = r.period
        if any(b <= a for a, b in zip(keys, keys[1:])):
            raise ValidationError("periods are not in increasing order")
        periods = {r.period for r in self.records}
        for s in self.shocks:
            if s.period not in periods:
                raise ValidationError(f"shock {s.label!r} refers to unknown period {s.period!r}")

    def __len__(self) -> int:
        return len(self.records)

    @property
    def periods(self) -> list[str]:
        return [r.period for r in self.records]

    def column(self, name: str) -> list[float | None]:
        return [getattr(r, name) for r in self.records]

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "records": [asdict(r) for r in self.records],
            "shocks": [asdict(s) for s in self.shocks],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> MacroSeries:
        return cls(
            records=tuple(MacroRecord(**r) for r in d["records"]),
            beta=float(d.get("beta", DEFAULT_BETA)),
            shocks=tuple(ShockAnnotation(**s) for s in d.get("shocks", ())),
        )

    def to_json(self, path: str | Path | None = None) -> str:
        text = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            Path(path).write_text(text + "\n", encoding="utf-8")
        return text

    @classmethod
    def from_json(cls, text: str) -> MacroSeries:
        return cls.from_dict(json.loads(text))

    @classmethod
    def load_json(cls, path: str | Path) -> MacroSeries:
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class CsvSchema:
    """Maps MacroRecord fields to CSV column names; unmapped fields use their own name."""

    columns: Mapping[str, str] = field(default_factory=dict)
    beta: float = DEFAULT_BETA

    def column_for(self, name: str) -> str:
        return self.columns.get(name, name)


def _parse_number(raw: str, row: int, column: str) -> float:
    try:
        return float(raw.strip())
    except ValueError:
        raise CsvParseError(f"row {row}: column {column!r} is not a number: {raw!r}") from None


def ingest_csv(path: str | Path, schema: CsvSchema | None = None) -> MacroSeries:
    """Read a headed UTF-8 CSV of macro observations into a validated MacroSeries.

    Row numbers in diagnostics count the header as row 1.
    """
    schema = schema or CsvSchema()
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        if not header:
            raise ValidationError(f"{path}: no records")
        missing = [schema.column_for(n) for n in MANDATORY if schema.column_for(n) not in header]
        if missing:
            raise ValidationError(f"{path}: header lacks mandatory column(s) {missing}")

        records = []
        for row_no, row in enumerate(reader, start=2):
            values: dict[str, object] = {}
            for name in MANDATORY:
                col = schema.column_for(name)
                raw = (row.get(col) or "").strip()
                if not raw:
                    raise ValidationError(f"row {row_no}: missing mandatory field {col!r}")
                values[name] = raw if name == "period" else _parse_number(raw, row_no, col)
            for name in OPTIONAL:
                col = schema.column_for(name)
                raw = (row.get(col) or "").strip()
                values[name] = _parse_number(raw, row_no, col) if raw else None
            period_key(values["period"])
            try:
                records.append(MacroRecord(**values))
            except ValidationError as exc:
                raise ValidationError(f"row {row_no}: {exc}") from None

    if not records:
        raise ValidationError(f"{path}: no records")
    return MacroSeries(tuple(records), beta=schema.beta)


def write_csv(series: MacroSeries, path: str | Path) -> None:
    names = [f.name for f in fields(MacroRecord)]
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for r in series.records:
            row = []
            for n in names:
                v = getattr(r, n)
                row.append("" if v is None else v if n == "period" else repr(v))
            w.writerow(row)


def t_transform(series: MacroSeries) -> list[float]:
    """t_i = ln(GDP_i) + ln(M3_i) + beta * policy_rate_i."""
    return [
        math.log(r.gdp_real) + math.log(r.m3) + series.beta * r.policy_rate for r in series.records
    ]


def index_map(t_raw: Sequence[float], mode: Literal["raw", "rank"] = "raw") -> list[float]:
    if len(t_raw) == 0:
        raise ValueError("t_raw is empty")
    if mode == "raw":
        return [float(t) for t in t_raw]
    if mode == "rank":
        order = np.argsort(np.asarray(t_raw, dtype=float), kind="stable")
        ranks = np.empty(len(order))
        ranks[order] = np.arange(1, len(order) + 1)
        return ranks.tolist()
    raise ValueError(f"unknown index mode {mode!r}")


@dataclass(frozen=True)
class ForecastTable:
    """A small numeric table keyed by its first column (e.g. the forecast fixtures)."""

    index_name: str
    index: tuple[float, ...]
    columns: Mapping[str, tuple[float, ...]]

    def __len__(self) -> int:
        return len(self.index)

    def __getitem__(self, name: str) -> list[float]:
        return list(self.columns[name])


def load_table(path: str | Path) -> ForecastTable:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if len(rows) < 2:
        raise ValidationError(f"{path}: no records")
    header, body = rows[0], rows[1:]
    cols: dict[str, list[float]] = {h: [] for h in header}
    for row_no, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise CsvParseError(f"row {row_no}: expected {len(header)} fields, got {len(row)}")
        for h, raw in zip(header, row):
            cols[h].append(_parse_number(raw, row_no, h))
    index = tuple(cols.pop(header[0]))
    return ForecastTable(header[0], index, {k: tuple(v) for k, v in cols.items()})
