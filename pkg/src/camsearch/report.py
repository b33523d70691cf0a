"""Report rendering: plain-text table, per-task CSV, JSON, and figures.

Figures are written alongside the delimited output: the cumulative
success-rate-vs-budget curve per track and a per-track score bar chart.
"""

from __future__ import annotations

import csv
import json

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .env import TURN_BUDGET  # noqa: E402
from .metrics import (  # noqa: E402
    Report,
    auc_crr,
    report_to_json,
    ssrr,
    tws_term,
)

_COLUMNS = ("n", "TWS", "Top-1", "SR@5", "SRt@5", "AvgT_s", "AUC-CRR",
            "SSRR", "Premature", "Timeout%", "OverFilter%")


def _row(report: Report) -> list[str]:
    avg = ("-" if report.avg_turns_success is None
           else f"{report.avg_turns_success:.2f}")
    return [
        str(report.n),
        f"{report.tws:.3f}",
        f"{100 * report.top1:.1f}",
        f"{100 * report.sr5:.1f}",
        f"{100 * report.sr_at[4]:.1f}",
        avg,
        f"{report.auc_crr:.3f}",
        f"{report.ssrr:.3f}",
        str(report.premature),
        f"{100 * report.timeout_rate:.1f}",
        f"{100 * report.over_filter_rate:.1f}",
    ]


def render_text(reports: dict[str, Report]) -> str:
    names = list(reports)
    widths = [max(len(n), 8) for n in names]
    head = "metric".ljust(12) + "".join(
        n.rjust(w + 2) for n, w in zip(names, widths)
    )
    lines = [head, "-" * len(head)]
    rows = {name: _row(rep) for name, rep in reports.items()}
    for i, col in enumerate(_COLUMNS):
        line = col.ljust(12) + "".join(
            rows[n][i].rjust(w + 2) for n, w in zip(names, widths)
        )
        lines.append(line)
    return "\n".join(lines)


def write_report_json(reports: dict[str, Report], path) -> None:
    payload = {name: report_to_json(rep) for name, rep in reports.items()}
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, sort_keys=True, indent=1)
        f.write("\n")


def write_csv(transcripts, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow([
            "task_id", "track", "outcome", "turns_used", "oracle_turns",
            "initial_candidates", "final_candidates", "tws", "auc_crr",
            "ssrr", "predicted", "target", "premature", "over_filter",
            "redundant_q", "wrong_tool",
        ])
        for t in sorted(transcripts, key=lambda x: x.task_id):
            writer.writerow([
                t.task_id, t.track, t.outcome, t.turns_used, t.oracle_turns,
                t.initial_candidates, t.trace[-1] if t.trace else "",
                f"{tws_term(t):.6f}", f"{auc_crr(t):.6f}", f"{ssrr(t):.6f}",
                t.predicted, t.target,
                t.counters.get("premature", 0),
                t.counters.get("over_filter", 0),
                t.counters.get("redundant_q", 0),
                t.counters.get("wrong_tool", 0),
            ])


def write_figures(reports: dict[str, Report], outdir) -> list[str]:
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    budgets = range(1, TURN_BUDGET + 1)
    for name, rep in reports.items():
        ax.plot(budgets, [100 * v for v in rep.sr_at], marker="o",
                markersize=3, label=name)
    ax.set_xlabel("turn budget")
    ax.set_ylabel("cumulative success rate (%)")
    ax.set_xlim(1, TURN_BUDGET)
    ax.set_ylim(0, 102)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    path = outdir / "sr_curve.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(str(path))

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    names = list(reports)
    x = range(len(names))
    ax.bar([i - 0.2 for i in x], [reports[n].tws for n in names],
           width=0.4, label="TWS")
    ax.bar([i + 0.2 for i in x], [reports[n].top1 for n in names],
           width=0.4, label="Top-1")
    ax.set_xticks(list(x))
    ax.set_xticklabels(names, rotation=20, ha="right")
    ax.set_ylim(0, 1.05)
    ax.grid(axis="y", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    path = outdir / "scores.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(str(path))
    return written
