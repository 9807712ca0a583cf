#!/usr/bin/env python3
"""Render capacity-sweep CSV files as bound-vs-width figures.

Consumes only the public sweep schema
(``activation,d,method,bound,std_error,c3_opt,gamma_opt,ez,mc_samples,seed,runtime_s``)
and the versioned reference data file shipped with the solver package; it
never imports solver internals.  One line per method with error bars,
plus dashed horizontal overlays at the replica-theory large-width
asymptotes recorded in the reference file.

Usage:
    python plots.py --in sweep.csv --out fig.png --activation quad
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

EXPECTED_COLUMNS = ["activation", "d", "method", "bound", "std_error",
                    "c3_opt", "gamma_opt", "ez", "mc_samples", "seed",
                    "runtime_s"]

METHOD_LABELS = {"rdt": "plain bound", "plrdt": "partially lifted bound"}
OVERLAY_LABELS = {"replica-rs": "replica-symmetric limit",
                  "replica-1rsb": "replica 1rsb limit"}

_DEFAULT_REFERENCE = os.path.join(
    os.path.dirname(os.path.abspath(__file__)),
    "..", "src", "tcmcap", "data", "reference_values.json")


class SchemaError(ValueError):
    """The input CSV does not carry the expected sweep columns."""


@dataclass
class PlotSpec:
    input_csv: str
    output_image: str
    activation: str
    overlays: list[tuple[str, float]] = field(default_factory=list)


def load_overlays(reference_path: str, activation: str) -> list[tuple[str, float]]:
    """Large-width asymptotes recorded for one activation, as (label, value)."""
    with open(reference_path, encoding="utf-8") as fh:
        payload = json.load(fh)
    out = []
    for rec in payload["values"]:
        if (rec["activation"] == activation and rec["d"] == "inf"
                and rec["method"] in OVERLAY_LABELS):
            out.append((OVERLAY_LABELS[rec["method"]], float(rec["value"])))
    return out


def load_rows(path: str, activation: str) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        columns = reader.fieldnames or []
        if columns != EXPECTED_COLUMNS:
            missing = [c for c in EXPECTED_COLUMNS if c not in columns]
            extra = [c for c in columns if c not in EXPECTED_COLUMNS]
            raise SchemaError(
                f"unexpected sweep schema: missing {missing or 'none'}, "
                f"unexpected {extra or 'none'}, order-sensitive expected "
                f"{EXPECTED_COLUMNS}")
        rows = [r for r in reader if r["activation"] == activation]
    if not rows:
        raise SchemaError(
            f"no rows for activation {activation!r} in {path}")
    return rows


def build_figure(rows: list[dict], activation: str,
                 overlays: list[tuple[str, float]]):
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    methods = sorted({r["method"] for r in rows})
    for method in methods:
        pts = sorted((int(r["d"]), float(r["bound"]),
                      float(r["std_error"] or 0.0))
                     for r in rows if r["method"] == method)
        d_vals = [p[0] for p in pts]
        bounds = [p[1] for p in pts]
        errs = [p[2] for p in pts]
        ax.errorbar(d_vals, bounds, yerr=errs, marker="o", capsize=3,
                    label=METHOD_LABELS.get(method, method))
    for label, value in overlays:
        ax.axhline(value, linestyle="--", linewidth=1.2, color="crimson",
                   label=f"{label} ({value:g})")
    ax.set_xlabel("d")
    ax.set_ylabel("capacity upper bound (α)")
    ax.set_title(f"{activation} activation: capacity upper bound vs hidden width")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return fig


def render(spec: PlotSpec) -> str:
    """Read the sweep, draw the figure, write the image; returns the path."""
    rows = load_rows(spec.input_csv, spec.activation)
    fig = build_figure(rows, spec.activation, spec.overlays)
    try:
        fig.savefig(spec.output_image, dpi=150)
    finally:
        plt.close(fig)
    return spec.output_image


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--in", dest="input_csv", required=True)
    parser.add_argument("--out", dest="output_image", required=True)
    parser.add_argument("--activation", required=True,
                        choices=["linear", "quad", "relu"])
    parser.add_argument("--reference", default=_DEFAULT_REFERENCE,
                        help="path of the versioned reference data file")
    args = parser.parse_args(argv)
    try:
        overlays = load_overlays(args.reference, args.activation)
        spec = PlotSpec(input_csv=args.input_csv,
                        output_image=args.output_image,
                        activation=args.activation, overlays=overlays)
        render(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {args.output_image}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
