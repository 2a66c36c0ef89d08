"""Offline rendering of benchmark reports: CSV summary plus figures.

Consumes the plot-ready JSON emitted by `dyto bench` (and optionally a
clusters JSON from `dyto cluster`) and writes delimited output and PNG
figures next to it. Kept separate from the subcommand surface, which only
emits machine-readable JSON.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

METRIC_COLUMNS = ("coverage", "accuracy", "reconstruction_error", "tokens_used", "wall_time_ms")


def write_summary_csv(report: dict, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("method",) + METRIC_COLUMNS)
        for method, row in sorted(report["methods"].items()):
            writer.writerow([method] + [row[c] for c in METRIC_COLUMNS])


def _method_bars(report: dict, ax, metric: str) -> None:
    methods = sorted(report["methods"])
    values = [report["methods"][m][metric] for m in methods]
    ax.bar(methods, values, color=["#3d7bb6", "#c0504d"][: len(methods)])
    ax.set_title(metric.replace("_", " "))
    ax.grid(axis="y", alpha=0.3)


def render_method_comparison(report: dict, path: Path) -> None:
    fig, axes = plt.subplots(1, 3, figsize=(11, 3.2))
    for ax, metric in zip(axes, ("coverage", "accuracy", "reconstruction_error")):
        _method_bars(report, ax, metric)
    fig.suptitle("event coverage / segmentation accuracy / reconstruction error")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_per_case(report: dict, path: Path) -> None:
    cases = report.get("cases", [])
    if not cases:
        return
    methods = sorted(report["methods"])
    events = sorted({c["events"] for c in cases})
    fig, axes = plt.subplots(1, 2, figsize=(10, 3.5))
    for ax, metric in zip(axes, ("accuracy", "coverage")):
        for method in methods:
            means = [
                np.mean([c[method][metric] for c in cases if c["events"] == e]) for e in events
            ]
            ax.plot(events, means, marker="o", label=method)
        ax.set_xlabel("events in video")
        ax.set_ylabel(metric)
        ax.set_ylim(0, 1.05)
        ax.grid(alpha=0.3)
    axes[0].legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_cluster_strip(clusters: dict, path: Path) -> None:
    """Timeline strip: one colored band per cluster, keyframes ticked."""
    labels = np.asarray(clusters["levels"][clusters["selected_level"]]["labels"])
    fig, ax = plt.subplots(figsize=(10, 1.6))
    ax.imshow(labels[None, :], aspect="auto", cmap="tab20", interpolation="nearest")
    for frame in clusters.get("keyframes", []):
        ax.axvline(frame, color="black", linewidth=1.2)
    ax.set_yticks([])
    ax.set_xlabel("frame")
    ax.set_title("discovered events over time (bars mark keyframes)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_report(report: dict, outdir: Path, clusters: dict | None = None) -> list:
    """Write summary.csv and figures into outdir; returns written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = [outdir / "summary.csv", outdir / "methods.png"]
    write_summary_csv(report, written[0])
    render_method_comparison(report, written[1])
    if report.get("cases"):
        written.append(outdir / "per_events.png")
        render_per_case(report, written[-1])
    if clusters is not None:
        written.append(outdir / "clusters.png")
        render_cluster_strip(clusters, written[-1])
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dyto-report", description="Render a bench report JSON to CSV and figures"
    )
    parser.add_argument("report", help="path to report.json from `dyto bench`")
    parser.add_argument("--outdir", default="report-out", help="directory for CSV and PNGs")
    parser.add_argument("--clusters", default=None, help="optional clusters JSON to render")
    args = parser.parse_args(argv)
    report = json.loads(Path(args.report).read_text())
    clusters = json.loads(Path(args.clusters).read_text()) if args.clusters else None
    for path in render_report(report, Path(args.outdir), clusters):
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
