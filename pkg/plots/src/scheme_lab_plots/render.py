"""Render scheme-lab sweep CSVs as line charts.

Three figure kinds, one per CSV schema:

* ``rule-components``  -- columns w, x, y, z: the optimal reward components
  against the budget.
* ``theta-star``       -- columns w, theta: the optimal dependence parameter
  against the budget.
* ``theta-compare``    -- columns w, performance_theta_star,
  performance_theta_zero: tuned-dependence vs independent performance
  (join two sweeps on w to build it).

Axis ranges are fixed (w in [0, 1.5], values in [-1, 1.6]) so figures are
comparable across runs, and no timestamps are embedded: rendering the same
CSV twice produces byte-identical PNGs.

Usage: ``render_figures <kind> <in.csv> <out.png>``
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

KINDS = ("rule-components", "theta-star", "theta-compare")

_REQUIRED = {
    "rule-components": ("w", "x", "y", "z"),
    "theta-star": ("w", "theta"),
    "theta-compare": ("w", "performance_theta_star", "performance_theta_zero"),
}

_X_RANGE = (0.0, 1.5)
_Y_RANGE = (-1.0, 1.6)


class SchemaError(ValueError):
    """The input CSV lacks a column the figure kind needs."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    csv_path: str
    out_path: str


def _read_columns(path: str, required: tuple[str, ...]) -> dict[str, list[float]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for name in required:
            if name not in header:
                raise SchemaError(f"column {name!r} missing from {path}")
        data: dict[str, list[float]] = {name: [] for name in required}
        for row in reader:
            for name in required:
                cell = (row[name] or "").strip()
                data[name].append(float(cell) if cell else math.nan)
    return data


def render(spec: FigureSpec) -> None:
    """Write the figure described by ``spec``; inputs are never modified."""
    if spec.kind not in KINDS:
        raise SchemaError(f"unknown figure kind {spec.kind!r}; expected one of {KINDS}")
    data = _read_columns(spec.csv_path, _REQUIRED[spec.kind])
    w = data["w"]

    fig, ax = plt.subplots(figsize=(7.0, 4.5), dpi=150)
    if spec.kind == "rule-components":
        ax.plot(w, data["x"], label="x (first-period pay)", color="#1f77b4")
        ax.plot(w, data["y"], label="y (skip-then-perform pay)", color="#2ca02c")
        ax.plot(w, data["z"], label="z (second-performance pay)", color="#d62728")
        ax.set_ylabel("reward component")
    elif spec.kind == "theta-star":
        ax.plot(w, data["theta"], color="#1f77b4", label="optimal theta")
        ax.set_ylabel("dependence parameter")
    else:
        ax.plot(w, data["performance_theta_star"], color="#1f77b4",
                label="tuned dependence")
        ax.plot(w, data["performance_theta_zero"], color="#d62728",
                linestyle="--", label="independent costs")
        ax.set_ylabel("performance")
    ax.set_xlabel("budget w")
    ax.set_xlim(*_X_RANGE)
    ax.set_ylim(*_Y_RANGE)
    ax.grid(True, alpha=0.3)
    if w:
        ax.legend(loc="upper left")
    fig.tight_layout()
    try:
        fig.savefig(spec.out_path, metadata={"Date": None})
    finally:
        plt.close(fig)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="render_figures", description=__doc__)
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("csv_path")
    parser.add_argument("out_path")
    args = parser.parse_args(argv)
    try:
        render(FigureSpec(kind=args.kind, csv_path=args.csv_path, out_path=args.out_path))
    except (SchemaError, OSError, ValueError) as exc:
        print(f"render_figures: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
