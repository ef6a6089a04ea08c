"""CSV and table rendering for CLI output.

Floats are written with ``repr`` (shortest round-trip form), so identical
runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
from typing import Sequence


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def render_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [[_fmt(v) for v in row] for row in rows]
    widths = [
        max(len(header[i]), *(len(r[i]) for r in cells)) if cells else len(header[i])
        for i in range(len(header))
    ]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for row in cells:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


STATS_HEADER = (
    "total_paths",
    "unique_paths",
    "mean_length",
    "median_length",
    "min_length",
    "max_length",
    "nodes",
    "links",
    "density",
)

SELECT_HEADER = ("K", "dof", "log_likelihood_nats", "aic", "objective", "selected")

EVALUATE_HEADER = ("method", "K", "loss_bits", "n_targets", "n_fallbacks")

ROC_HEADER = ("false_positive_rate", "true_positive_rate")


def stats_rows(stats_payload: dict) -> list[list]:
    return [[stats_payload[k] for k in STATS_HEADER]]


def select_rows(rows: list[dict]) -> list[list]:
    return [
        [
            r["order"],
            r["degrees_of_freedom"],
            r["log_likelihood"],
            r["aic"],
            r["objective"],
            int(r["selected"]),
        ]
        for r in rows
    ]


def evaluate_rows(payload: dict) -> list[list]:
    loss = payload["loss_bits"]
    return [
        [
            payload["method"],
            payload["order"],
            float("inf") if loss is None else loss,
            payload["n_targets"],
            payload["n_fallbacks"],
        ]
    ]


def roc_csv(payload: dict) -> str:
    body = render_csv(ROC_HEADER, [[x, y] for x, y in payload["points"]])
    return body + f"auc,{_fmt(payload['auc'])}\n"
