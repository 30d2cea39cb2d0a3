from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from bicgrad.models import ParamValue, ResultRow


def fmt(value: ParamValue | None) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


@dataclass(frozen=True)
class Summary:
    checked: int
    passed: int
    informational: int

    @property
    def ok(self) -> bool:
        return self.passed == self.checked

    @property
    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.passed}/{self.checked}"


def summarize(rows: Sequence[ResultRow]) -> Summary:
    checked = [r for r in rows if r.passed is not None]
    return Summary(
        checked=len(checked),
        passed=sum(1 for r in checked if r.passed),
        informational=len(rows) - len(checked),
    )


def failing(rows: Sequence[ResultRow]) -> list[ResultRow]:
    return [r for r in rows if r.passed is False]


def param_columns(rows: Sequence[ResultRow]) -> list[str]:
    return sorted({key for r in rows for key, _ in r.params})


def write_csv(rows: Sequence[ResultRow], path: Path) -> None:
    """experiment, param.* (sorted), value, bound, pass, ms; one line per row."""
    keys = param_columns(rows)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = ["experiment", *(f"param.{k}" for k in keys), "value", "bound", "pass", "ms"]
        writer.writerow(header)
        for r in rows:
            params = r.param_dict
            writer.writerow(
                [
                    r.experiment,
                    *(fmt(params.get(k)) for k in keys),
                    fmt(r.value),
                    fmt(r.bound),
                    fmt(r.passed),
                    "" if r.ms is None else format(r.ms, ".1f"),
                ]
            )


def write_data(rows: Sequence[ResultRow], path: Path) -> int:
    """Gnuplot data blocks, one per (experiment, fixed parameters) series.

    Each block starts with `# experiment key=value ...`, holds `x y` lines
    sorted by x, and is followed by two blank lines. Returns the block count.
    """
    series: dict[tuple[str, tuple], list[tuple[float, float]]] = defaultdict(list)
    for r in rows:
        if r.sweep is None:
            continue
        params = r.param_dict
        if r.sweep not in params:
            continue
        fixed = tuple((k, v) for k, v in r.params if k != r.sweep)
        series[(r.experiment, (r.sweep, fixed))].append((float(params[r.sweep]), r.value))
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for (experiment, (sweep, fixed)), points in sorted(series.items(), key=lambda kv: kv[0]):
            header = " ".join(f"{k}={fmt(v)}" for k, v in fixed)
            fh.write(f"# {experiment} {header}".rstrip() + "\n")
            fh.write(f"# {sweep} value\n")
            for x, y in sorted(points):
                fh.write(f"{fmt(x)} {fmt(y)}\n")
            fh.write("\n\n")
    return len(series)


def format_table(rows: Sequence[ResultRow]) -> str:
    lines = [f"{'experiment':<28} {'value':>14} {'bound':>14}  status  params"]
    for r in rows:
        status = {True: "ok", False: "FAIL", None: "-"}[r.passed]
        params = " ".join(f"{k}={fmt(v)}" for k, v in r.params)
        bound = fmt(r.bound) or "-"
        lines.append(f"{r.experiment:<28} {fmt(r.value):>14} {bound:>14}  {status:<6}  {params}")
    return "\n".join(lines)


def report(rows: Sequence[ResultRow]) -> str:
    """Table, summary line and an echo of every failing row."""
    summary = summarize(rows)
    parts = [format_table(rows), "", summary.line]
    bad = failing(rows)
    if bad:
        parts.append("failing rows:")
        parts += [
            "  " + r.experiment + " " + " ".join(f"{k}={fmt(v)}" for k, v in r.params)
            + f" value={fmt(r.value)} bound={fmt(r.bound)}"
            for r in bad
        ]
    return "\n".join(parts)
