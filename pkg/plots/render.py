#!/usr/bin/env python3
"""Render batch-experiment results: scale histograms and CDF comparisons.

This script is deliberately decoupled from the solver package; its only
input is the experiment CSV, whose 31-column header is restated here as
the interface contract.  Optimum columns may be empty on budget-flagged
rows; such rows are skipped for the affected series.  All numbers come
from the float twin columns, which exist for exactly this purpose.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

RULES = ("mes", "seqphragmen", "cc", "pav")

MODELS = ("ic", "euclidean")

AXIOMS = ("jr", "ejr")

FORMATS = ("png", "svg")


class SchemaError(ValueError):
    """The CSV does not carry the experiment layout."""


class EmptySelectionError(ValueError):
    """No rows survive the model filter."""


def expected_header() -> list[str]:
    columns = [
        "model",
        "param",
        "n",
        "m",
        "k",
        "seed",
        "alpha_jr_opt",
        "alpha_jr_opt_float",
        "alpha_ejr_opt",
        "alpha_ejr_opt_float",
    ]
    for rule in RULES:
        columns += [
            f"{rule}_jr_mean",
            f"{rule}_jr_mean_float",
            f"{rule}_ejr_mean",
            f"{rule}_ejr_mean_float",
            f"{rule}_count",
        ]
    columns.append("flags")
    return columns


@dataclass(frozen=True)
class PlotSpec:
    csv_path: str
    axiom: str
    out_path: str
    model: Optional[str] = None
    image_format: str = "png"
    bins: int = 20

    def __post_init__(self):
        if self.axiom not in AXIOMS:
            raise ValueError(f"axiom must be one of {AXIOMS}, got {self.axiom!r}")
        if self.model is not None and self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.image_format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.image_format!r}")
        if self.bins < 1:
            raise ValueError("bins must be positive")


def load_rows(csv_path: str) -> list[dict]:
    header = expected_header()
    with open(csv_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first != header:
            raise SchemaError(f"{csv_path} does not carry the experiment header")
        rows = []
        for line_number, parts in enumerate(reader, start=2):
            if not parts:
                continue
            if len(parts) != len(header):
                raise SchemaError(f"{csv_path}:{line_number} has {len(parts)} columns")
            rows.append(dict(zip(header, parts)))
    return rows


def _selected(rows: list[dict], model: Optional[str]) -> list[dict]:
    picked = [row for row in rows if model is None or row["model"] == model]
    if not picked:
        raise EmptySelectionError(f"no rows for model filter {model!r}")
    return picked


def _floats(rows: list[dict], column: str) -> list[float]:
    return [float(row[column]) for row in rows if row[column] != ""]


def histogram_data(spec: PlotSpec) -> dict[str, list[float]]:
    """Optimal scales of the chosen axiom, keyed by model."""
    rows = _selected(load_rows(spec.csv_path), spec.model)
    column = f"alpha_{spec.axiom}_opt_float"
    series = {}
    for model in MODELS:
        values = _floats([row for row in rows if row["model"] == model], column)
        if values:
            series[model] = values
    if not series:
        raise EmptySelectionError("every selected row is missing the optimum")
    return series


def binned(values: list[float], bins: int) -> list[int]:
    """Counts over equal bins of [0, 1]; the last bin closes at 1."""
    counts = [0] * bins
    for value in values:
        index = int(value * bins)
        counts[min(max(index, 0), bins - 1)] += 1
    return counts


def bin_edges(bins: int) -> list[float]:
    return [index / bins for index in range(bins + 1)]


def render_histogram(spec: PlotSpec) -> tuple[list[float], dict[str, list[int]]]:
    """Side-by-side per-model histogram; returns the plotted counts."""
    series = histogram_data(spec)
    edges = bin_edges(spec.bins)
    counts = {model: binned(values, spec.bins) for model, values in series.items()}
    figure, axes = plt.subplots(figsize=(6.4, 4.0))
    slot = 1 / spec.bins
    width = slot * 0.9 / len(counts)
    for position, (model, heights) in enumerate(counts.items()):
        lefts = [edge + slot * 0.05 + position * width for edge in edges[:-1]]
        axes.bar(lefts, heights, width=width, align="edge", label=model)
    axes.set_xlim(0, 1)
    axes.set_xlabel("optimal alpha")
    axes.set_ylabel("instances")
    axes.legend()
    figure.savefig(spec.out_path, format=spec.image_format)
    plt.close(figure)
    return edges, counts


def cdf_data(spec: PlotSpec) -> dict[str, list[float]]:
    """Sorted scale samples per curve: the optimum plus one per rule."""
    rows = _selected(load_rows(spec.csv_path), spec.model)
    curves = {"optimum": sorted(_floats(rows, f"alpha_{spec.axiom}_opt_float"))}
    for rule in RULES:
        curves[rule] = sorted(_floats(rows, f"{rule}_{spec.axiom}_mean_float"))
    if not curves["optimum"]:
        raise EmptySelectionError("every selected row is missing the optimum")
    return curves


def cumulative_share(values: list[float], point: float) -> float:
    """Empirical CDF of a sorted sample at one point."""
    covered = 0
    for value in values:
        if value > point:
            break
        covered += 1
    return covered / len(values)


def render_cdf(spec: PlotSpec) -> dict[str, list[float]]:
    """Step CDF per curve; returns the plotted samples."""
    curves = cdf_data(spec)
    figure, axes = plt.subplots(figsize=(6.4, 4.0))
    for name, values in curves.items():
        xs = [0.0] + values
        ys = [0.0] + [rank / len(values) for rank in range(1, len(values) + 1)]
        style = {"linewidth": 2.2} if name == "optimum" else {}
        axes.step(xs, ys, where="post", label=name, **style)
    axes.set_xlim(0, 1)
    axes.set_ylim(0, 1.02)
    axes.set_xlabel("alpha")
    axes.set_ylabel("cumulative share of instances")
    axes.legend()
    figure.savefig(spec.out_path, format=spec.image_format)
    plt.close(figure)
    return curves


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Plot experiment CSVs: per-model scale histograms or rule-vs-optimum CDFs."
    )
    parser.add_argument("--csv", required=True, help="experiment results file")
    parser.add_argument("--axiom", required=True, choices=AXIOMS)
    parser.add_argument("--kind", required=True, choices=("hist", "cdf"))
    parser.add_argument("--out", required=True, help="image destination")
    parser.add_argument("--model", choices=MODELS, default=None, help="restrict to one model")
    parser.add_argument("--bins", type=int, default=20, help="histogram bins (default 20)")
    parser.add_argument(
        "--format",
        dest="image_format",
        choices=FORMATS,
        default=None,
        help="image format; defaults to the --out suffix, else png",
    )
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    image_format = args.image_format
    if image_format is None:
        suffix = args.out.rsplit(".", 1)[-1].lower()
        image_format = suffix if suffix in FORMATS else "png"
    try:
        spec = PlotSpec(
            csv_path=args.csv,
            axiom=args.axiom,
            out_path=args.out,
            model=args.model,
            image_format=image_format,
            bins=args.bins,
        )
        if args.kind == "hist":
            render_histogram(spec)
        else:
            render_cdf(spec)
    except (SchemaError, EmptySelectionError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
