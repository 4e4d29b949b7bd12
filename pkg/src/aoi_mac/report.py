"""Text comparison of TDMA and FDMA from a result CSV."""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

from .experiment import COLUMNS

METRICS = (
    ("avg_aoi_analytic", "average AoI (theory)"),
    ("avg_aoi_sim", "average AoI (simulation)"),
    ("bounded_aoi_sim", "bounded AoI (simulation)"),
    ("bounded_aoi_chebyshev", "bounded AoI (Chebyshev bound)"),
)


class ReportError(ValueError):
    pass


def read_rows(path) -> list[dict]:
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in COLUMNS if c not in header]
            if missing:
                raise ReportError(f"{path}: missing columns {', '.join(missing)}")
            rows = []
            for lineno, rec in enumerate(reader, start=2):
                try:
                    row = {"scheme": rec["scheme"].strip().upper(), "N": int(rec["N"])}
                    row["power_db"] = float(rec["power_db"])
                    for col, _ in METRICS:
                        row[col] = float(rec[col])
                except (TypeError, ValueError, AttributeError) as exc:
                    raise ReportError(f"{path}:{lineno}: malformed row ({exc})") from None
                if row["scheme"] not in ("TDMA", "FDMA"):
                    raise ReportError(f"{path}:{lineno}: unknown scheme {rec['scheme']!r}")
                rows.append(row)
    except UnicodeDecodeError as exc:
        raise ReportError(f"{path}: not UTF-8 text ({exc})") from None
    if not rows:
        raise ReportError(f"{path}: no data rows")
    return rows


def winners(rows, column):
    """``[(power_db, winner)]`` for powers where both schemes have a row; lower wins."""
    table = defaultdict(dict)
    for r in rows:
        table[r["power_db"]][r["scheme"]] = r[column]
    out = []
    for power in sorted(table):
        pair = table[power]
        if "TDMA" not in pair or "FDMA" not in pair:
            continue
        t, f = pair["TDMA"], pair["FDMA"]
        out.append((power, "TDMA" if t < f else "FDMA" if f < t else "tie"))
    return out


def crossovers(sequence):
    """Powers at which the winner differs from the last non-tie winner."""
    flips, last = [], None
    for power, win in sequence:
        if win == "tie":
            continue
        if last is not None and win != last:
            flips.append((power, last, win))
        last = win
    return flips


def _fmt_db(p):
    return f"{p:g} dB"


def compare_report(path) -> str:
    rows = read_rows(path)
    by_users = defaultdict(list)
    for r in rows:
        by_users[r["N"]].append(r)
    lines = []
    for users in sorted(by_users):
        group = by_users[users]
        lines.append(f"N = {users}")
        seq = {col: winners(group, col) for col, _ in METRICS}
        powers = [p for p, _ in seq[METRICS[0][0]]]
        lines.append("  power     " + "  ".join(f"{label:>30}" for _, label in METRICS))
        for i, p in enumerate(powers):
            cells = "  ".join(f"{seq[col][i][1]:>30}" for col, _ in METRICS)
            lines.append(f"  {_fmt_db(p):>8}  {cells}")
        for col, label in METRICS:
            s = seq[col]
            flips = crossovers(s)
            decided = {w for _, w in s if w != "tie"}
            if not s:
                lines.append(f"  {label}: no power with both schemes")
            elif not flips and len(decided) == 1:
                lines.append(f"  {label}: {decided.pop()} uniformly better")
            elif not flips:
                lines.append(f"  {label}: schemes tie at every power")
            else:
                desc = "; ".join(f"{a} -> {b} at {_fmt_db(p)}" for p, a, b in flips)
                lines.append(f"  {label}: crossover {desc}")
    return "\n".join(lines) + "\n"
