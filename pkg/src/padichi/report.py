"""Report rendering for verification runs: a delimited table plus a
summary figure, written side by side into a chosen directory."""

from __future__ import annotations

import csv
import os


def write_report(reports, directory) -> dict:
    """Write suites.csv and summary.png for a list of SuiteReport values.

    Returns the paths written.  The figure import stays local so that the
    plain CLI paths never pay the matplotlib startup cost.
    """
    os.makedirs(directory, exist_ok=True)
    csv_path = os.path.join(directory, "suites.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["suite", "trials", "failures", "seed", "wall_time"])
        for r in reports:
            writer.writerow([r.suite, r.trials, r.failures, r.seed,
                             f"{r.wall_time:.6f}" if r.wall_time is not None
                             else ""])

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    names = [r.suite for r in reports]
    passes = [r.trials - r.failures for r in reports]
    fails = [r.failures for r in reports]
    fig, ax = plt.subplots(figsize=(max(6, 0.9 * len(names)), 3.6))
    xs = range(len(names))
    ax.bar(xs, passes, color="#4a7ebb", label="passing trials")
    if any(fails):
        ax.bar(xs, fails, bottom=passes, color="#c44e52", label="failures")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names, rotation=30, ha="right")
    ax.set_ylabel("trials")
    ax.set_title("verification suites")
    ax.legend(loc="lower right")
    fig.tight_layout()
    png_path = os.path.join(directory, "summary.png")
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return {"csv": csv_path, "png": png_path}
