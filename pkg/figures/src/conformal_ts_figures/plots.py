"""Render benchmark summaries into static figures.

Reads only the persisted summary JSON (no in-process coupling to the
benchmark package).  Rendering is deterministic: cells are iterated in
sorted order, the SVG hash salt is fixed, and no timestamps are embedded,
so the same summary yields byte-identical SVG output.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "conformal-ts-figures"

import matplotlib.pyplot as plt

# fixed style per method so panels are comparable across processes
METHOD_STYLE = {
    "scp": ("#1f77b4", "o"),
    "scp-block": ("#ff7f0e", "s"),
    "wcp": ("#2ca02c", "^"),
    "enbpi": ("#d62728", "D"),
    "aci": ("#9467bd", "v"),
}
FALLBACK_STYLE = ("#7f7f7f", "x")


@dataclass(frozen=True)
class FigureSpec:
    """What to plot: input summary, output directory, format, panels."""

    summary_path: Path
    out_dir: Path
    image_format: str = "svg"
    processes: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.image_format not in ("svg", "png"):
            raise ValueError(f"unsupported image format {self.image_format!r}; use svg or png")


def load_summary(path) -> dict:
    """Parse and validate a benchmark summary document."""
    try:
        with open(path) as fh:
            summary = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read summary {path}: {exc}") from exc
    cells = summary.get("cells")
    if not isinstance(cells, dict) or not cells:
        raise ValueError(
            f"summary {path} has no result cells; expected the benchmark schema "
            '{"alpha": ..., "nominal_coverage": ..., "cells": {process: {method: {variant: ...}}}}'
        )
    return summary


def _iter_cells(process_block: dict):
    for method in sorted(process_block):
        for variant in sorted(process_block[method]):
            yield method, variant, process_block[method][variant]


def _save(fig, path: Path, fmt: str) -> None:
    metadata = {"Date": None} if fmt == "svg" else None
    fig.savefig(path, format=fmt, metadata=metadata)
    plt.close(fig)


def plot_coverage_width(spec: FigureSpec) -> list[Path]:
    """One coverage-vs-width panel per process, with 95% error bars and a
    vertical line at the nominal coverage target.

    Cells whose width is infinite in any replicate are omitted from the
    panel and listed in an annotation.  Requested processes missing from
    the summary are skipped with a warning.
    """
    summary = load_summary(spec.summary_path)
    cells = summary["cells"]
    nominal = summary.get("nominal_coverage", 0.9)
    wanted = list(spec.processes) or sorted(cells)
    missing = [p for p in wanted if p not in cells]
    if missing:
        warnings.warn(f"processes missing from summary, skipped: {', '.join(missing)}")
    out_paths = []
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    for process in [p for p in wanted if p in cells]:
        fig, ax = plt.subplots(figsize=(6.4, 4.8))
        skipped = []
        for method, variant, cell in _iter_cells(cells[process]):
            label = f"{method} {variant}".rstrip(" -")
            if cell.get("width_mean") is None or cell.get("n_infinite_width", 0) > 0:
                skipped.append(label)
                continue
            color, marker = METHOD_STYLE.get(method, FALLBACK_STYLE)
            container = ax.errorbar(
                cell["coverage_mean"],
                cell["width_mean"],
                xerr=cell.get("coverage_half", 0.0),
                yerr=cell.get("width_half", 0.0),
                color=color,
                marker=marker,
                markersize=6,
                capsize=2,
                linestyle="none",
                label=label,
            )
            container.lines[0].set_gid(f"point-{method}-{variant}")
        line = ax.axvline(nominal, color="black", linestyle="--", linewidth=1)
        line.set_gid("nominal-coverage")
        if skipped:
            note = ax.annotate(
                "omitted (unbounded width): " + ", ".join(skipped),
                xy=(0.02, 0.02),
                xycoords="axes fraction",
                fontsize=7,
            )
            note.set_gid("omitted-cells")
        ax.set_xlabel("coverage")
        ax.set_ylabel("width")
        ax.set_title(process)
        ax.legend(fontsize=7, loc="best")
        path = spec.out_dir / f"coverage_width_{process}.{spec.image_format}"
        _save(fig, path, spec.image_format)
        out_paths.append(path)
    return out_paths


def runtime_means(summary: dict) -> dict[str, float]:
    """Mean runtime per method-variant, aggregated across processes."""
    acc: dict[str, list[float]] = {}
    for process in sorted(summary["cells"]):
        for method, variant, cell in _iter_cells(summary["cells"][process]):
            acc.setdefault(f"{method} {variant}".rstrip(" -"), []).append(cell["runtime_ms_mean"])
    return {label: sum(v) / len(v) for label, v in sorted(acc.items())}


def plot_runtime(spec: FigureSpec) -> Path:
    """Bar chart of mean runtime per method-variant across all processes."""
    summary = load_summary(spec.summary_path)
    means = runtime_means(summary)
    labels = list(means)
    values = [means[k] for k in labels]
    colors = [METHOD_STYLE.get(label.split(" ")[0], FALLBACK_STYLE)[0] for label in labels]
    fig, ax = plt.subplots(figsize=(8.0, 4.8))
    bars = ax.bar(range(len(labels)), values, color=colors)
    for bar, label in zip(bars, labels):
        bar.set_gid(f"bar-{label.replace(' ', '-')}")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("mean runtime (ms)")
    ax.set_title("average runtime by method")
    fig.tight_layout()
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    path = spec.out_dir / f"runtime.{spec.image_format}"
    _save(fig, path, spec.image_format)
    return path
