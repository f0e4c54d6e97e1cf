"""Figure rendering for reports.

One verdict-summary chart per report, plus a value chart whenever the
check witnesses expose a recognizable numeric field (cokernel ranks,
stability indices, filtration lengths, ...).  Files land in the
requested directory next to the delimited output.
"""

import os
from typing import List, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .report import FAIL, NON_VERDICT, PASS, Report

_VALUE_FIELDS = (
    "cokernel_rank",
    "evaluated_cofactor",
    "index",
    "stable_from",
    "length",
    "nil_bound",
    "rank",
    "dim",
)

_VERDICT_COLORS = {PASS: "#2a9d4e", FAIL: "#d43d2a", NON_VERDICT: "#e0a400"}


def _witness_value(rec) -> Optional[float]:
    if not rec.witness:
        return None
    for key in _VALUE_FIELDS:
        v = rec.witness.get(key)
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            return float(v)
    return None


def render_report_figures(report: Report, figdir: str) -> List[str]:
    os.makedirs(figdir, exist_ok=True)
    written = []
    counts = report.counts()

    fig, ax = plt.subplots(figsize=(4.5, 3))
    labels = [PASS, FAIL, NON_VERDICT]
    ax.bar(labels, [counts[k] for k in labels],
           color=[_VERDICT_COLORS[k] for k in labels])
    ax.set_title(f"suite {report.suite}: verdicts")
    ax.set_ylabel("checks")
    fig.tight_layout()
    path = os.path.join(figdir, f"{report.suite}-verdicts.png")
    fig.savefig(path)
    plt.close(fig)
    written.append(path)

    valued = [(r.check, _witness_value(r), r.verdict)
              for r in report.sorted_records()]
    valued = [(c, v, verdict) for c, v, verdict in valued if v is not None]
    if valued:
        fig, ax = plt.subplots(figsize=(max(4.5, 0.3 * len(valued)), 3.2))
        xs = range(len(valued))
        ax.bar(xs, [v for _, v, _ in valued],
               color=[_VERDICT_COLORS[verdict] for _, _, verdict in valued])
        ax.set_title(f"suite {report.suite}: witness values")
        ax.set_ylabel("value")
        if len(valued) <= 24:
            ax.set_xticks(list(xs))
            ax.set_xticklabels([c for c, _, _ in valued],
                               rotation=60, ha="right", fontsize=6)
        else:
            ax.set_xlabel("check (sorted by id)")
        fig.tight_layout()
        path = os.path.join(figdir, f"{report.suite}-values.png")
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written
