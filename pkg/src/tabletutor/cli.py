"""Command-line entry points: train, eval, plan, replay, serve, report."""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import Config, ConfigError, load_config

EXIT_OK = 0
EXIT_BAD_ARGS = 2
EXIT_TASK_FAILURE = 3
EXIT_TEACHER_ERROR = 4

DOMAINS = ("store_objects", "set_table", "cook_meal")


def _load_config(path) -> Config:
    try:
        return load_config(path)
    except (ConfigError, OSError) as e:
        click.echo(f"config error: {e}", err=True)
        sys.exit(EXIT_BAD_ARGS)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=False),
              default=None, help="key=value config file")
@click.pass_context
def main(ctx, config_path):
    """Learn predicates and operators from teacher feedback, then plan."""
    ctx.obj = _load_config(config_path)


@main.command()
@click.option("--domain", required=True, type=click.Choice(DOMAINS))
@click.option("--tasks", "task_count", default=10, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--teacher", default="scripted",
              type=click.Choice(["scripted", "remote"]), show_default=True)
@click.option("--varied-feedback", is_flag=True,
              help="sample synonym phrasings instead of canonical ones")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.pass_obj
def train(config: Config, domain, task_count, seed, teacher,
          varied_feedback, out_dir):
    """Run a training session and write the learned-domain bundle."""
    from .agent import run_training
    from .oracle import FeedbackOracle
    from .tasks import training_tasks
    from .teacher import TeacherError, make_teacher

    task_list = training_tasks(domain)[:task_count]
    if not task_list:
        click.echo("no tasks selected", err=True)
        sys.exit(EXIT_BAD_ARGS)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    oracle = FeedbackOracle(
        domain, variant_mode="varied" if varied_feedback else "canonical",
        seed=seed,
    )
    try:
        backend = make_teacher(domain, config.teacher_config(backend=teacher))
    except ValueError as e:
        click.echo(f"bad teacher configuration: {e}", err=True)
        sys.exit(EXIT_BAD_ARGS)
    try:
        session = run_training(
            domain, task_list, backend, seed=seed, oracle=oracle,
            out_dir=out, log_path=out / "session.jsonl",
            heuristic=config.heuristic,
        )
    except TeacherError as e:
        click.echo(f"teacher error: {e}", err=True)
        sys.exit(EXIT_TEACHER_ERROR)
    click.echo(
        f"trained {domain} seed {seed}: "
        f"{len(session.records)} transitions, "
        f"{session.feedback_count} feedback events, "
        f"{len(session.operators)} operators -> {out}"
    )


@main.command("eval")
@click.option("--bundle", "bundle_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--suite", default="canonical", show_default=True,
              type=click.Choice(["canonical", "more_objects", "novel_goals",
                                 "combined", "all"]))
@click.option("--seed", default=0, show_default=True)
@click.option("--assert", "threshold", type=float, default=None,
              help="exit 3 if any evaluated suite scores below this rate")
@click.option("--report-dir", type=click.Path(), default=None,
              help="write JSON/text/CSV tables and figures here")
@click.pass_obj
def eval_cmd(config: Config, bundle_dir, suite, seed, threshold, report_dir):
    """Evaluate a learned bundle on generated test suites."""
    from .agent import load_bundle
    from .evalharness import RunReport, evaluate
    from .tasks import SUITES, generate_suite
    from .teacher.scripted import ScriptedTeacher

    bundle = Path(bundle_dir)
    try:
        _, _, meta = load_bundle(bundle)
    except (OSError, KeyError, ValueError) as e:
        click.echo(f"bad bundle: {e}", err=True)
        sys.exit(EXIT_BAD_ARGS)
    domain = meta["domain_id"]
    teacher = ScriptedTeacher(domain)
    suites = list(SUITES) if suite == "all" else [suite]
    report = RunReport(domain_id=domain, label=f"{domain} seed {seed}",
                       seeds=[seed])
    report.counts[seed] = {
        key: meta.get(key, 0)
        for key in ("feedback_events", "teacher_calls", "transitions")
    }
    failed = False
    for family in suites:
        tasks = generate_suite(domain, family, seed)
        result = evaluate(bundle, tasks, teacher, suite=family, seed=seed,
                          heuristic=config.heuristic)
        report.suite_results.append(result)
        rate = result.success_rate
        click.echo(f"{family}: {rate:.2f}")
        for outcome in result.outcomes:
            if not outcome["success"]:
                click.echo(f"  fail {outcome['task_id']}: "
                           f"{outcome['reason']}")
        if threshold is not None and rate < threshold:
            failed = True
    if report_dir:
        from .reporting import write_report_files

        written = write_report_files([report], report_dir)
        for path in written:
            click.echo(f"wrote {path}")
    if failed:
        sys.exit(EXIT_TASK_FAILURE)


@main.command()
@click.option("--bundle", "bundle_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--problem", "problem_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def plan(config: Config, bundle_dir, problem_path):
    """Plan for an external PDDL problem against a learned domain."""
    from .pddl.model import PddlProblem
    from .pddl.parser import parse_pddl, PddlParseError
    from .pddl.planner import plan as run_planner, validate_plan

    try:
        domain = parse_pddl((Path(bundle_dir) / "domain.pddl").read_text())
        problem = parse_pddl(Path(problem_path).read_text())
    except (OSError, PddlParseError) as e:
        click.echo(f"parse error: {e}", err=True)
        sys.exit(EXIT_BAD_ARGS)
    if not isinstance(problem, PddlProblem):
        click.echo("expected a problem file, got a domain", err=True)
        sys.exit(EXIT_BAD_ARGS)
    result = run_planner(domain, problem, heuristic=config.heuristic)
    if not result.ok:
        click.echo(f"no plan: {result.status}", err=True)
        sys.exit(EXIT_TASK_FAILURE)
    if not validate_plan(domain, problem, result.plan):
        click.echo("planner returned an invalid plan", err=True)
        sys.exit(EXIT_TASK_FAILURE)
    for action in result.plan.actions:
        click.echo(str(action))
    click.echo(f"; length {result.plan.cost}, "
               f"{result.expansions} expansions, {result.elapsed:.3f}s")


@main.command()
@click.option("--log", "log_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
def replay(log_path):
    """Re-render a recorded session log step by step."""
    lines = Path(log_path).read_text().splitlines()
    for lineno, line in enumerate(lines, 1):
        try:
            event = json.loads(line)
        except json.JSONDecodeError:
            click.echo(f"malformed log line {lineno}", err=True)
            sys.exit(EXIT_BAD_ARGS)
        step = event.get("step", "?")
        episode = event.get("episode", "?")
        kind = event.get("type", "?")
        payload = event.get("payload", {})
        if kind == "feedback":
            detail = f"[{payload.get('kind')}] {payload.get('text', '')}"
        elif kind == "proposal":
            detail = payload.get("action") or payload.get("kind", "")
        elif kind == "episode_start":
            detail = payload.get("task", {}).get("task_id", "")
        else:
            detail = json.dumps(payload, sort_keys=True)
        click.echo(f"ep{episode} step{step} {kind}: {detail}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8321, show_default=True)
@click.option("--static-dir", type=click.Path(), default=None,
              help="directory of built UI assets to serve at /")
@click.pass_obj
def serve(config: Config, host, port, static_dir):
    """Run the HTTP session service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(config, static_dir=static_dir),
                host=host, port=port)


@main.command()
@click.option("--domain", required=True, type=click.Choice(DOMAINS))
@click.option("--seeds", default="0,1,2", show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--bootstrap-from", type=click.Choice(DOMAINS), default=None,
              help="also run a bootstrapped variant seeded with this "
                   "domain's learned predicates")
@click.pass_obj
def report(config: Config, domain, seeds, out_dir, bootstrap_from):
    """Full multi-seed experiment with tables and figures."""
    from .evalharness import bootstrap_experiment, full_experiment
    from .reporting import render_text, write_report_files

    try:
        seed_list = tuple(int(s) for s in seeds.split(","))
    except ValueError:
        click.echo(f"bad --seeds value {seeds!r}", err=True)
        sys.exit(EXIT_BAD_ARGS)
    out = Path(out_dir)
    if bootstrap_from:
        results = bootstrap_experiment(bootstrap_from, domain, out / "runs",
                                       seeds=seed_list,
                                       heuristic=config.heuristic)
        reports = [results["from_scratch"], results["bootstrapped"]]
    else:
        reports = [full_experiment(domain, out / "runs", seeds=seed_list,
                                   heuristic=config.heuristic)]
    log = out / "runs" / f"seed{seed_list[0]}" / "session.jsonl"
    written = write_report_files(reports, out, session_log=log)
    click.echo(render_text(reports))
    for path in written:
        click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
