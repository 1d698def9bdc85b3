"""Delimited and graphical summaries of corpus runs.

The CLI report path hands this module one row per (test, model, outcome
clause); everything here is presentation.  Rows are plain dicts so the
figures stay decoupled from the checker types:

    {"test": "lb", "model": "imm", "clause": "r1 = 1 && r2 = 1",
     "allowed": True, "expected": "allow", "enumerated": 4,
     "consistent": 4}

expected is None when the litmus file carries no annotation for that
model.
"""
from __future__ import annotations

import csv
from typing import Dict, List, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Patch, Rectangle
from matplotlib.ticker import MaxNLocator

CSV_FIELDS = (
    "test",
    "model",
    "clause",
    "verdict",
    "expected",
    "matches",
    "enumerated",
    "consistent",
)

_ALLOW = "#8fc693"
_FORBID = "#e0988f"
_MIXED = "#e5d07e"
_MISSING = "#ececec"


def row_matches(row: dict) -> bool:
    if row["expected"] is None:
        return True
    return row["expected"] == ("allow" if row["allowed"] else "forbid")


def write_csv(path, rows: Sequence[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for r in rows:
            writer.writerow(
                [
                    r["test"],
                    r["model"],
                    r["clause"],
                    "allow" if r["allowed"] else "forbid",
                    r["expected"] or "",
                    "" if r["expected"] is None else ("yes" if row_matches(r) else "no"),
                    r["enumerated"],
                    r["consistent"],
                ]
            )


def _axes(rows: Sequence[dict], model_order: Sequence[str]) -> Tuple[List[str], List[str]]:
    tests = sorted({r["test"] for r in rows})

    def key(m: str):
        if m in model_order:
            return (model_order.index(m), "")
        return (len(model_order), m)

    models = sorted({r["model"] for r in rows}, key=key)
    return tests, models


def verdict_matrix(path, rows: Sequence[dict], model_order: Sequence[str] = ()) -> None:
    """Tests x models grid of allow/forbid cells.

    A heavy red frame and a trailing ! mark a verdict that contradicts
    the annotation in the litmus file; gray cells were not run.
    """
    tests, models = _axes(rows, model_order)
    cells: Dict[tuple, List[dict]] = {}
    for r in rows:
        cells.setdefault((r["test"], r["model"]), []).append(r)

    fig, ax = plt.subplots(
        figsize=(1.35 * len(models) + 2.2, 0.45 * len(tests) + 1.8)
    )
    for i, t in enumerate(tests):
        y = len(tests) - 1 - i
        for j, m in enumerate(models):
            group = cells.get((t, m))
            if not group:
                color, text, bad = _MISSING, "", False
            else:
                verdicts = {"allow" if r["allowed"] else "forbid" for r in group}
                text = verdicts.pop() if len(verdicts) == 1 else "mixed"
                color = {"allow": _ALLOW, "forbid": _FORBID}.get(text, _MIXED)
                bad = not all(row_matches(r) for r in group)
            ax.add_patch(
                Rectangle(
                    (j, y),
                    1,
                    1,
                    facecolor=color,
                    edgecolor="red" if bad else "white",
                    linewidth=2.5 if bad else 0.8,
                )
            )
            if text:
                ax.text(
                    j + 0.5,
                    y + 0.5,
                    text + (" !" if bad else ""),
                    ha="center",
                    va="center",
                    fontsize=9,
                )
    ax.set_xlim(0, len(models))
    ax.set_ylim(0, len(tests))
    ax.set_xticks([j + 0.5 for j in range(len(models))])
    ax.set_xticklabels(models, rotation=30, ha="right")
    ax.set_yticks([len(tests) - 0.5 - i for i in range(len(tests))])
    ax.set_yticklabels(tests)
    ax.tick_params(length=0)
    for side in ("top", "right", "bottom", "left"):
        ax.spines[side].set_visible(False)
    ax.set_title("verdict per test and model")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def execution_counts(path, rows: Sequence[dict], model_order: Sequence[str] = ()) -> None:
    """Grouped bars per test: candidates enumerated (outline) and the
    count each model accepts (filled)."""
    tests, models = _axes(rows, model_order)
    enumerated: Dict[tuple, int] = {}
    consistent: Dict[tuple, int] = {}
    for r in rows:
        enumerated[(r["test"], r["model"])] = r["enumerated"]
        consistent[(r["test"], r["model"])] = r["consistent"]

    width = 1.0 / (len(models) + 1)
    colors = plt.get_cmap("tab10").colors
    fig, ax = plt.subplots(figsize=(0.9 * len(tests) * max(len(models), 2) * width + 3.0, 4.2))
    for k, m in enumerate(models):
        offs = [i + (k - (len(models) - 1) / 2) * width for i in range(len(tests))]
        outline = [enumerated.get((t, m), 0) for t in tests]
        filled = [consistent.get((t, m), 0) for t in tests]
        ax.bar(offs, outline, width=width, facecolor="none", edgecolor="0.6", linewidth=0.8)
        ax.bar(offs, filled, width=width, color=colors[k % len(colors)], label=m)
    ax.set_xticks(range(len(tests)))
    ax.set_xticklabels(tests, rotation=30, ha="right")
    ax.yaxis.set_major_locator(MaxNLocator(integer=True))
    ax.set_ylabel("executions")
    handles, labels = ax.get_legend_handles_labels()
    handles.append(Patch(facecolor="none", edgecolor="0.6", label="enumerated"))
    labels.append("enumerated")
    ax.legend(handles, labels, fontsize=8, ncol=2)
    ax.set_title("consistent executions per test")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
