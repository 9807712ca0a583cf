"""Embedded reference estimates: the published bound table and the
replica-theory large-width asymptotes.

The records live in ``data/reference_values.json``, a versioned file that
ships with the package and is also consumed by the standalone plotting
script.  Known internal discrepancies of the published numbers are
handled by widened tolerances, never by editing the values; each record
carries a source note saying so.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

__all__ = ["ReferenceValue", "lookup", "all_values", "data_path", "DATA_VERSION"]

DATA_VERSION = 1


@dataclass(frozen=True)
class ReferenceValue:
    activation: str
    d: float              # width, math.inf for the asymptotes
    method: str           # rdt | plrdt | replica-rs | replica-1rsb
    value: float
    tolerance: float
    source: str


def data_path() -> str:
    """Filesystem path of the shipped reference data file."""
    return str(resources.files("tcmcap").joinpath("data/reference_values.json"))


@lru_cache(maxsize=1)
def all_values() -> tuple[ReferenceValue, ...]:
    with open(data_path(), encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("version") != DATA_VERSION:
        raise ValueError(
            f"reference data version {payload.get('version')!r} does not "
            f"match the expected {DATA_VERSION}")
    out = []
    for rec in payload["values"]:
        d = math.inf if rec["d"] == "inf" else int(rec["d"])
        out.append(ReferenceValue(
            activation=rec["activation"], d=d, method=rec["method"],
            value=float(rec["value"]), tolerance=float(rec["tolerance"]),
            source=rec["source"]))
    return tuple(out)


def lookup(activation: str, d, method: str) -> ReferenceValue | None:
    """The embedded record for one cell, or None if none is published."""
    d = math.inf if d in ("inf", math.inf) else int(d)
    for rec in all_values():
        if (rec.activation == activation and rec.d == d
                and rec.method == method):
            return rec
    return None
