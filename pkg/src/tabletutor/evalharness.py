"""Evaluation harness: test suites, cross-seed experiments, run reports."""
from __future__ import annotations

import json
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .agent import run_test, run_training, load_bundle
from .oracle import FeedbackOracle
from .tasks import SUITES, Task, generate_suite, training_tasks
from .teacher.scripted import ScriptedTeacher
from .teacher.types import TeacherBackendConfig


def _mean_std(values: list[float]) -> tuple[float, float]:
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, std


def _quantiles(values: list[float]) -> dict:
    if not values:
        return {"median": 0.0, "min": 0.0, "max": 0.0}
    return {
        "median": statistics.median(values),
        "min": min(values),
        "max": max(values),
    }


@dataclass
class SuiteResult:
    suite: str
    seed: int
    outcomes: list[dict]  # {task_id, success, reason, plan_length, plan_seconds}

    @property
    def success_rate(self) -> float:
        return sum(o["success"] for o in self.outcomes) / len(self.outcomes)

    @property
    def plan_times(self) -> list[float]:
        return [o["plan_seconds"] for o in self.outcomes]


@dataclass
class RunReport:
    domain_id: str
    label: str
    seeds: list[int]
    suite_results: list[SuiteResult] = field(default_factory=list)
    train_seconds: dict = field(default_factory=dict)   # seed -> float
    counts: dict = field(default_factory=dict)          # seed -> meta counts

    def rates(self) -> dict:
        """suite -> (mean, std) over seeds."""
        out = {}
        for suite in SUITES:
            values = [r.success_rate for r in self.suite_results
                      if r.suite == suite]
            if values:
                out[suite] = _mean_std(values)
        return out

    def plan_time_stats(self) -> dict:
        times = [t for r in self.suite_results for t in r.plan_times]
        return _quantiles(times)

    def train_time_stats(self) -> dict:
        return _quantiles(list(self.train_seconds.values()))

    def count_totals(self) -> dict:
        keys = ("feedback_events", "teacher_calls", "transitions")
        return {
            key: [self.counts[seed].get(key, 0) for seed in self.seeds]
            for key in keys
        }

    def to_json(self) -> dict:
        return {
            "domain_id": self.domain_id,
            "label": self.label,
            "seeds": self.seeds,
            "success_rates": {
                suite: {"mean": mean, "std": std}
                for suite, (mean, std) in self.rates().items()
            },
            "plan_time_seconds": self.plan_time_stats(),
            "train_time_seconds": self.train_time_stats(),
            "counts": self.count_totals(),
            "suites": [
                {
                    "suite": r.suite,
                    "seed": r.seed,
                    "success_rate": r.success_rate,
                    "outcomes": r.outcomes,
                }
                for r in self.suite_results
            ],
        }


def evaluate(bundle_dir: str | Path, tasks: list[Task], teacher,
             suite: str = "custom", seed: int = 0,
             heuristic: str = "hmax") -> SuiteResult:
    outcomes = []
    for task in tasks:
        result = run_test(bundle_dir, task, teacher, heuristic=heuristic)
        outcomes.append({
            "task_id": task.task_id,
            "success": result.success,
            "reason": result.reason,
            "plan_length": result.plan_length,
            "plan_seconds": result.plan_seconds,
        })
    return SuiteResult(suite=suite, seed=seed, outcomes=outcomes)


def _train_one(domain_id: str, seed: int, out_dir: Path,
               variant_mode: str = "canonical",
               initial_registry=None,
               teacher_config: Optional[TeacherBackendConfig] = None,
               heuristic: str = "hmax"):
    teacher = ScriptedTeacher(domain_id, teacher_config)
    oracle = FeedbackOracle(domain_id, variant_mode=variant_mode, seed=seed)
    started = time.time()
    session = run_training(
        domain_id, training_tasks(domain_id), teacher,
        seed=seed, oracle=oracle, out_dir=out_dir,
        log_path=out_dir / "session.jsonl",
        initial_registry=initial_registry, heuristic=heuristic,
    )
    return session, teacher, time.time() - started


def full_experiment(domain_id: str, out_root: str | Path,
                    seeds: tuple[int, ...] = (0, 1, 2),
                    variant_mode: str = "canonical",
                    initial_registry=None,
                    teacher_config: Optional[TeacherBackendConfig] = None,
                    label: Optional[str] = None,
                    heuristic: str = "hmax") -> RunReport:
    """Train and evaluate all four suites for each seed."""
    out_root = Path(out_root)
    report = RunReport(domain_id=domain_id, label=label or domain_id,
                       seeds=list(seeds))
    for seed in seeds:
        bundle = out_root / f"seed{seed}"
        bundle.mkdir(parents=True, exist_ok=True)
        _, teacher, elapsed = _train_one(
            domain_id, seed, bundle, variant_mode=variant_mode,
            initial_registry=initial_registry,
            teacher_config=teacher_config, heuristic=heuristic,
        )
        report.train_seconds[seed] = elapsed
        _, _, meta = load_bundle(bundle)
        report.counts[seed] = {
            key: meta.get(key, 0)
            for key in ("feedback_events", "teacher_calls", "transitions")
        }
        for suite in SUITES:
            tasks = generate_suite(domain_id, suite, seed)
            report.suite_results.append(
                evaluate(bundle, tasks, teacher, suite=suite, seed=seed,
                         heuristic=heuristic)
            )
    return report


def bootstrap_experiment(source_domain: str, target_domain: str,
                         out_root: str | Path,
                         seeds: tuple[int, ...] = (0, 1, 2),
                         heuristic: str = "hmax") -> dict:
    """Train the target domain twice per seed: from scratch and initialized
    with the predicates learned in the source domain."""
    out_root = Path(out_root)
    scratch = full_experiment(
        target_domain, out_root / "from_scratch", seeds=seeds,
        label=f"{target_domain} (from scratch)", heuristic=heuristic,
    )
    boot = RunReport(domain_id=target_domain,
                     label=f"{target_domain} (bootstrapped from "
                           f"{source_domain})",
                     seeds=list(seeds))
    for seed in seeds:
        source_dir = out_root / "source" / f"seed{seed}"
        source_dir.mkdir(parents=True, exist_ok=True)
        _train_one(source_domain, seed, source_dir, heuristic=heuristic)
        registry, _, _ = load_bundle(source_dir)
        bundle = out_root / "bootstrapped" / f"seed{seed}"
        bundle.mkdir(parents=True, exist_ok=True)
        _, teacher, elapsed = _train_one(
            target_domain, seed, bundle, initial_registry=registry,
            heuristic=heuristic,
        )
        boot.train_seconds[seed] = elapsed
        _, _, meta = load_bundle(bundle)
        boot.counts[seed] = {
            key: meta.get(key, 0)
            for key in ("feedback_events", "teacher_calls", "transitions")
        }
        for suite in SUITES:
            tasks = generate_suite(target_domain, suite, seed)
            boot.suite_results.append(
                evaluate(bundle, tasks, teacher, suite=suite, seed=seed,
                         heuristic=heuristic)
            )
    return {"from_scratch": scratch, "bootstrapped": boot}


def save_report(report: RunReport, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"
    )
