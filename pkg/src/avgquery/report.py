"""Serializable experiment reports and an order-preserving trial map."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable

SCHEMA_VERSION = 1


def map_trials(fn: Callable[[int], Any], trials: Iterable[int], threads: int = 1) -> list:
    """``[fn(t) for t in trials]``, optionally on a thread pool.

    Results come back in trial order, so aggregates never depend on
    scheduling.
    """
    trials = list(trials)
    if threads <= 1 or len(trials) < 2:
        return [fn(t) for t in trials]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, trials))


def jsonable(value):
    """Recursively convert report values to plain JSON types.

    Fractions become ``"p/q"`` strings; non-finite floats become strings.
    """
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else value.numerator
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return value if math.isfinite(value) else str(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "item"):  # numpy scalar
        return jsonable(value.item())
    return str(value)


@dataclass
class ExperimentReport:
    """Parameters, measurements and the evaluated bound of one experiment.

    ``verdict`` is one of ``pass``, ``fail``, ``vacuous`` or ``info``.
    """

    experiment: str
    params: dict
    seed: int
    trials: int
    statistics: dict = field(default_factory=dict)
    bound: dict = field(default_factory=dict)
    verdict: str = "info"

    def to_dict(self) -> dict:
        return jsonable({
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "params": self.params,
            "seed": self.seed,
            "trials": self.trials,
            "statistics": self.statistics,
            "bound": self.bound,
            "verdict": self.verdict,
        })

    def to_json(self) -> str:
        return to_json(self.to_dict())

    def to_csv(self) -> str:
        return to_csv(self.to_dict())


def to_json(data: dict) -> str:
    return json.dumps(jsonable(data), sort_keys=True, indent=2) + "\n"


def to_csv(data: dict) -> str:
    """Flatten to CSV with sorted columns.

    One row, or one row per entry of ``statistics.rows`` (or top-level
    ``rows``) with the shared fields repeated.
    """
    data = jsonable(data)
    holder = data.get("statistics") if isinstance(data.get("statistics"), dict) else data
    rows = holder.pop("rows", None)
    base = _flatten(data)
    records = [base] if not rows else [{**base, **_flatten(r, "row")} for r in rows]
    columns = sorted({k for r in records for k in r})
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow(r)
    return buf.getvalue()


def render(data: dict, fmt: str = "json") -> str:
    if fmt == "json":
        return to_json(data)
    if fmt == "csv":
        return to_csv(data)
    raise ValueError(f"unknown format {fmt!r}")


def _flatten(data, prefix="") -> dict:
    out = {}
    if isinstance(data, dict):
        for k, v in data.items():
            key = f"{prefix}.{k}" if prefix else str(k)
            out.update(_flatten(v, key))
    elif isinstance(data, list):
        out[prefix] = json.dumps(data, sort_keys=True)
    else:
        out[prefix] = data
    return out
