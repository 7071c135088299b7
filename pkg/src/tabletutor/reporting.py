"""Report rendering: aligned text tables, CSV export, matplotlib figures."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .evalharness import RunReport  # noqa: E402
from .tasks import SUITES  # noqa: E402


def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [
        max(len(str(headers[i])), *(len(str(r[i])) for r in rows))
        if rows else len(str(headers[i]))
        for i in range(len(headers))
    ]
    def fmt(row):
        return "  ".join(str(cell).ljust(w) for cell, w in zip(row, widths))
    rule = "  ".join("-" * w for w in widths)
    return "\n".join([fmt(headers), rule] + [fmt(r) for r in rows])


def success_table(reports: list[RunReport]) -> str:
    headers = ["run"] + list(SUITES)
    rows = []
    for report in reports:
        rates = report.rates()
        row = [report.label]
        for suite in SUITES:
            mean, std = rates.get(suite, (0.0, 0.0))
            row.append(f"{mean:.2f} +/- {std:.2f}")
        rows.append(row)
    return _table(headers, rows)


def runtime_table(reports: list[RunReport]) -> str:
    headers = ["run", "train median (s)", "train max (s)",
               "plan median (s)", "plan max (s)"]
    rows = []
    for report in reports:
        train = report.train_time_stats()
        planning = report.plan_time_stats()
        rows.append([
            report.label,
            f"{train['median']:.1f}", f"{train['max']:.1f}",
            f"{planning['median']:.3f}", f"{planning['max']:.3f}",
        ])
    return _table(headers, rows)


def interaction_table(reports: list[RunReport]) -> str:
    headers = ["run", "#feedback", "#teacher calls", "#transitions"]
    rows = []
    for report in reports:
        counts = report.count_totals()
        rows.append([report.label] + [
            "/".join(str(v) for v in counts[key])
            for key in ("feedback_events", "teacher_calls", "transitions")
        ])
    return _table(headers, rows)


def render_text(reports: list[RunReport]) -> str:
    return "\n\n".join([
        "success rate (mean +/- std over seeds)",
        success_table(reports),
        "runtimes",
        runtime_table(reports),
        "interaction counts (per seed)",
        interaction_table(reports),
    ])


def write_csv(reports: list[RunReport], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run", "suite", "seed", "task_id", "success",
                         "plan_length", "plan_seconds", "reason"])
        for report in reports:
            for result in report.suite_results:
                for outcome in result.outcomes:
                    writer.writerow([
                        report.label, result.suite, result.seed,
                        outcome["task_id"], int(outcome["success"]),
                        outcome["plan_length"],
                        f"{outcome['plan_seconds']:.4f}",
                        outcome["reason"],
                    ])


def plot_success_rates(reports: list[RunReport], path: str | Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    width = 0.8 / max(len(reports), 1)
    xs = range(len(SUITES))
    for i, report in enumerate(reports):
        rates = report.rates()
        means = [rates.get(s, (0.0, 0.0))[0] for s in SUITES]
        stds = [rates.get(s, (0.0, 0.0))[1] for s in SUITES]
        offset = (i - (len(reports) - 1) / 2) * width
        ax.bar([x + offset for x in xs], means, width * 0.9, yerr=stds,
               capsize=3, label=report.label)
    ax.set_xticks(list(xs))
    ax.set_xticklabels(SUITES)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("success rate")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def learning_curve_points(log_path: str | Path) -> list[dict]:
    """Cumulative predicate/operator counts per step from a session log."""
    points = []
    predicates = 0
    operators = 0
    step = 0
    for line in Path(log_path).read_text().splitlines():
        event = json.loads(line)
        step = max(step, event.get("step", step))
        if event["type"] == "predicate_registered":
            predicates += 2  # a predicate and its negated partner
        elif event["type"] == "operators_learned":
            operators = len(event["payload"].get("names", []))
        points.append({"step": step, "predicates": predicates,
                       "operators": operators})
    return points


def plot_learning_curve(log_path: str | Path, path: str | Path) -> None:
    points = learning_curve_points(log_path)
    fig, ax = plt.subplots(figsize=(7, 4))
    steps = [p["step"] for p in points]
    ax.step(steps, [p["predicates"] for p in points], where="post",
            label="predicates (incl. negations)")
    ax.step(steps, [p["operators"] for p in points], where="post",
            label="operators")
    ax.set_xlabel("interaction step")
    ax.set_ylabel("count")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_plan_times(reports: list[RunReport], path: str | Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    for report in reports:
        times = sorted(
            t for r in report.suite_results for t in r.plan_times
        )
        if not times:
            continue
        fractions = [(i + 1) / len(times) for i in range(len(times))]
        ax.plot(times, fractions, label=report.label)
    ax.set_xlabel("plan time (s)")
    ax.set_ylabel("fraction of tasks")
    ax.set_xscale("log")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_report_files(reports: list[RunReport], out_dir: str | Path,
                       session_log: str | Path | None = None) -> list[Path]:
    """JSON + text + CSV + figures for a set of runs; returns written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    path = out / "report.json"
    path.write_text(json.dumps([r.to_json() for r in reports],
                               indent=2, sort_keys=True) + "\n")
    written.append(path)

    path = out / "report.txt"
    path.write_text(render_text(reports) + "\n")
    written.append(path)

    path = out / "results.csv"
    write_csv(reports, path)
    written.append(path)

    path = out / "success_rates.png"
    plot_success_rates(reports, path)
    written.append(path)

    path = out / "plan_times.png"
    plot_plan_times(reports, path)
    written.append(path)

    if session_log is not None and Path(session_log).exists():
        path = out / "learning_curve.png"
        plot_learning_curve(session_log, path)
        written.append(path)
    return written
