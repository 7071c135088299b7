"""Interactive training and evaluation loop.

A session owns the world, the predicate registry, the precondition
ledger, collected transitions and labels, and the current operator set.
Every mutation triggers the correction/re-parse/re-learn pipeline so the
symbolic model always reflects the latest feedback.
"""
from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from . import worldsim
from .dsl.interp import ExecError
from .dsl.parser import parse_program
from .dsl.registry import Literal, PredicateRegistry, parse_state
from .operators import Operator, Transition, learn_operators
from .oracle import FeedbackOracle
from .pddl import compile_domain, compile_problem, parse_pddl, plan
from .tasks import Task, goal_holds
from .teacher import library
from .teacher.types import (
    COUNTED_KINDS,
    CorrectionFailed,
    FeedbackEvent,
    PreconditionLedger,
    TeacherError,
)
from .worldsim import GroundedAction, WorldState, perceive


PLAN_PROBABILITY = 0.5
MAX_EPISODE_STEPS = 30
TRAIN_PLAN_EXPANSIONS = 50_000


@dataclass(frozen=True)
class Proposal:
    kind: str  # "action" | "declare_success"
    action: Optional[GroundedAction] = None


@dataclass(frozen=True)
class StepOutcome:
    kind: str  # executed | rejected | goal_confirmed | goal_corrected |
    #           goal_reached | stalled | aborted | exhausted
    detail: str = ""

    @property
    def episode_over(self) -> bool:
        return self.kind in ("goal_confirmed", "goal_reached", "stalled",
                             "aborted", "exhausted")


@dataclass
class TransitionRecord:
    world_pre: WorldState
    action: GroundedAction
    world_post: WorldState
    step: int
    s_pre: frozenset = frozenset()
    s_post: frozenset = frozenset()


class Session:
    """One training session: shared knowledge across a list of episodes."""

    def __init__(self, domain_id: str, teacher, seed: int = 0,
                 oracle: Optional[FeedbackOracle] = None,
                 initial_registry: Optional[PredicateRegistry] = None,
                 log_fn: Optional[Callable[[dict], None]] = None,
                 max_correction_iterations: int = 3,
                 heuristic: str = "hmax"):
        self.domain_id = domain_id
        self.teacher = teacher
        self.oracle = oracle
        self.heuristic = heuristic
        self.max_correction_iterations = max_correction_iterations
        self.rng = random.Random(f"agent:{domain_id}:{seed}")
        self.seed = seed
        self._log_fn = log_fn

        if initial_registry is not None:
            self.registry = initial_registry.copy()
        else:
            self.registry = PredicateRegistry()
        if "obj_in_gripper" not in self.registry.predicates:
            self._register_program(library.program_source(
                library.BY_NAME["obj_in_gripper"],
                known_utilities=frozenset(self.registry.utilities),
            ))
        self.ledger = PreconditionLedger()
        self.records: list[TransitionRecord] = []
        self.labels: list = []  # (PerceptionSnapshot, Literal, bool)
        self.operators: tuple[Operator, ...] = ()
        self._parsed_version = self.registry.version
        self._state_cache: dict = {}

        self.step = 0
        self.episode = -1
        self.feedback_count = 0
        self.teacher_calls = 0
        self.episode_results: list[dict] = []

        # per-episode state
        self.task: Optional[Task] = None
        self.world: Optional[WorldState] = None
        self.goal: Optional[list[tuple[Literal, bool]]] = None
        self.episode_steps = 0
        self.pending: Optional[Proposal] = None

    # -- logging --------------------------------------------------------------

    def log(self, type_: str, payload: dict) -> None:
        if self._log_fn is None:
            return
        self._log_fn({
            "step": self.step,
            "episode": self.episode,
            "type": type_,
            "payload": payload,
            "wall_time": time.time(),
        })

    # -- episode lifecycle ----------------------------------------------------

    def start_episode(self, task: Task) -> None:
        self.task = task
        self.world = task.reset()
        self.goal = None
        self.episode += 1
        self.episode_steps = 0
        self.pending = None
        self.log("episode_start", {"task": task.to_json()})

    def receive_goal(self, event: FeedbackEvent) -> None:
        out = self.teacher.reason(event, self.registry,
                                  list(self.task.objects))
        self._count_feedback(event)
        self.log("feedback", event.to_json())
        self._install_new_predicates(out.new_predicate_descriptions)
        self.goal = out.symbolic_goal or []
        self.log("goal_set", {
            "goal": [[str(l), v] for l, v in self.goal],
        })
        self._pipeline()

    # -- step: propose then apply ----------------------------------------------

    def propose(self) -> Optional[Proposal]:
        """Decide the next move; None when the episode hit its step cap."""
        if self.episode_steps >= MAX_EPISODE_STEPS:
            return None
        state = self._current_state()
        if self.goal and self._goal_holds_symbolically(state):
            self.pending = Proposal("declare_success")
            return self.pending
        action = None
        if self.rng.random() < PLAN_PROBABILITY:
            action = self._planned_action(state)
        if action is None:
            action = self._random_action(state)
        self.pending = Proposal("action", action) if action else None
        if self.pending:
            self.log("proposal", {"kind": self.pending.kind,
                                  "action": str(action) if action else None})
        return self.pending

    def apply(self, proposal: Proposal, event: FeedbackEvent) -> StepOutcome:
        self.pending = None
        self.step += 1
        self.episode_steps += 1
        self._count_feedback(event)
        self.log("feedback", event.to_json())
        try:
            if proposal.kind == "declare_success":
                return self._apply_declaration(event)
            return self._apply_action(proposal.action, event)
        except CorrectionFailed as e:
            self.log("error", {"kind": "correction_failed", "detail": str(e)})
            return StepOutcome("aborted", str(e))

    def _apply_declaration(self, event) -> StepOutcome:
        out = self.teacher.reason(event, self.registry,
                                  list(self.task.objects), goal=self.goal,
                                  ledger=self.ledger)
        snapshot = perceive(self.world)
        for literal, value in out.literal_labels:
            self.labels.append((snapshot, literal, value))
        self._install_new_predicates(out.new_predicate_descriptions)
        self._pipeline()
        if event.kind == "goal_achieved_signal":
            return StepOutcome("goal_confirmed")
        return StepOutcome("goal_corrected", event.text)

    def _apply_action(self, action, event) -> StepOutcome:
        out = self.teacher.reason(event, self.registry,
                                  list(self.task.objects), goal=self.goal,
                                  ledger=self.ledger)
        self._install_new_predicates(out.new_predicate_descriptions)
        if event.kind == "feasible_action_signal":
            world_pre = self.world
            self.world = worldsim.execute(self.world, action)
            snapshot = perceive(world_pre)
            for literal, value in out.literal_labels:
                self.labels.append((snapshot, literal, value))
            self.records.append(TransitionRecord(
                world_pre=world_pre, action=action, world_post=self.world,
                step=self.step,
            ))
            self.log("transition", {"action": str(action)})
            self._pipeline()
            if self.oracle is not None and self.oracle.goal_achieved(
                    self.world, self.task.goal):
                signal = self.oracle.verify_success(
                    self.world, self.task.goal, step=self.step
                )
                self._count_feedback(signal)
                self.log("feedback", signal.to_json())
                confirm = self.teacher.reason(
                    signal, self.registry, list(self.task.objects),
                    goal=self.goal, ledger=self.ledger,
                )
                post = perceive(self.world)
                for literal, value in confirm.literal_labels:
                    self.labels.append((post, literal, value))
                self._pipeline()
                return StepOutcome("goal_reached")
            return StepOutcome("executed", str(action))
        # rejected: explanation carries labels and a ledger entry
        snapshot = perceive(self.world)
        for literal, value in out.literal_labels:
            self.labels.append((snapshot, literal, value))
        if out.new_action_preconditions:
            schema, entries = out.new_action_preconditions
            for pattern, value in entries:
                if self.ledger.add(schema, pattern, value):
                    self.log("ledger_update", {
                        "schema": schema, "pattern": str(pattern),
                        "value": value,
                    })
        self._pipeline()
        return StepOutcome("rejected", event.text)

    # -- scripted driver --------------------------------------------------------

    def run_scripted_episode(self, task: Task) -> dict:
        if self.oracle is None:
            raise ValueError("scripted episodes need a feedback oracle")
        self.start_episode(task)
        self.receive_goal(self.oracle.specify_goal(task, step=self.step))
        result = {"task_id": task.task_id, "outcome": "exhausted"}
        while True:
            proposal = self.propose()
            if proposal is None:
                result["outcome"] = "exhausted"
                break
            if proposal.kind == "declare_success":
                event = self.oracle.verify_success(
                    self.world, task.goal, step=self.step
                )
            else:
                event = self.oracle.verify_action(
                    self.world, proposal.action, step=self.step
                )
            outcome = self.apply(proposal, event)
            if outcome.kind == "stalled":
                result["outcome"] = "stalled"
                break
            if outcome.episode_over:
                result["outcome"] = outcome.kind
                break
        result["steps"] = self.episode_steps
        self.episode_results.append(result)
        self.log("episode_end", dict(result))
        return result

    # -- internals ----------------------------------------------------------

    def _count_feedback(self, event: FeedbackEvent) -> None:
        self.teacher_calls += 1
        if event.kind in COUNTED_KINDS:
            self.feedback_count += 1

    def _goal_holds_symbolically(self, state) -> bool:
        from .dsl.registry import negation_name

        for literal, value in self.goal:
            want = literal if value else Literal(
                negation_name(literal.predicate), literal.args
            )
            if want not in state:
                return False
        return True

    def _current_state(self):
        return self._parse_cached(perceive(self.world))

    def _parse_cached(self, snapshot):
        key = (snapshot, self.registry.version)
        if key not in self._state_cache:
            self._state_cache[key] = self._parse_with_correction(snapshot)
        return self._state_cache[key]

    def _parse_with_correction(self, snapshot):
        """Parse a snapshot, routing runtime errors through the
        execution corrector (bounded retries per predicate)."""
        for _ in range(self.max_correction_iterations + 1):
            try:
                return parse_state(snapshot, self.registry)
            except ExecError as e:
                self._correct_execution_error(snapshot, e)
        raise CorrectionFailed(
            "execution correction exhausted its iteration budget"
        )

    def _correct_execution_error(self, snapshot, error: ExecError) -> None:
        name = error.message.split("(")[0].strip()
        if name not in self.registry.predicates:
            raise CorrectionFailed(f"cannot locate failing predicate: "
                                   f"{error.message}")
        from .dsl.ast import print_definition

        pred = self.registry.predicates[name]
        program = print_definition(pred.to_definition()) + "\n"
        trace = error.formatted()
        for _ in range(self.max_correction_iterations):
            program = self.teacher.correct_execution(program, trace)
            defs = parse_program(program)
            body = defs[-1].body
            try:
                self.registry.replace_predicate_body(name, body)
            except Exception as e:
                trace = str(e)
                continue
            self.log("predicate_corrected", {
                "name": name, "mode": "execution",
            })
            return
        raise CorrectionFailed(
            f"could not repair {name} after "
            f"{self.max_correction_iterations} attempts: {trace}"
        )

    def _install_new_predicates(self, descriptions: dict) -> None:
        if not descriptions:
            return
        programs = self.teacher.code(descriptions, self.registry)
        for name, source in sorted(programs.items()):
            self._register_program(source)
            self.log("predicate_registered", {
                "name": name, "source": source,
            })

    def _register_program(self, source: str) -> None:
        for defn in parse_program(source):
            if defn.kind == "util":
                if defn.name not in self.registry.utilities:
                    self.registry.register_utility(defn)
            else:
                self.registry.register_predicate(defn)

    def _pipeline(self) -> None:
        """Correction, transition re-parse, operator re-learning."""
        self._correct_alignment()
        if self._parsed_version != self.registry.version or any(
                not r.s_pre for r in self.records):
            for record in self.records:
                record.s_pre = self._parse_cached(perceive(record.world_pre))
                record.s_post = self._parse_cached(perceive(record.world_post))
            self._parsed_version = self.registry.version
        transitions = [
            Transition(r.s_pre, r.action, r.s_post, r.step,
                       self.registry.version)
            for r in self.records
        ]
        result = learn_operators(transitions, self.ledger.as_dict())
        self.operators = result.operators
        if result.diagnostics.contradictory or result.diagnostics.unexplained:
            self.log("learner_diagnostics", {
                "contradictory": len(result.diagnostics.contradictory),
                "unexplained": len(result.diagnostics.unexplained),
            })
        self.log("operators_learned", {
            "names": [op.name for op in self.operators],
        })

    def _correct_alignment(self) -> None:
        disagreeing = [
            (snap, lit, value) for snap, lit, value in self.labels
            if self._eval_with_correction(snap, lit) != value
        ]
        if not disagreeing:
            return
        replacements = self.teacher.correct_alignment(
            self.registry, self.labels
        )
        for name, body in sorted(replacements.items()):
            self.registry.replace_predicate_body(name, body)
            self.log("predicate_corrected", {
                "name": name, "mode": "alignment",
            })
        still_bad = [
            (str(lit), value) for snap, lit, value in self.labels
            if self._eval_with_correction(snap, lit) != value
        ]
        if still_bad:
            raise CorrectionFailed(f"labels still violated: {still_bad}")

    def _eval_with_correction(self, snapshot, literal) -> bool:
        for _ in range(self.max_correction_iterations + 1):
            try:
                return self.registry.evaluate(
                    literal.predicate, snapshot, literal.args
                )
            except ExecError as e:
                self._correct_execution_error(snapshot, e)
        raise CorrectionFailed(
            "execution correction exhausted its iteration budget"
        )

    def _planned_action(self, state) -> Optional[GroundedAction]:
        if not self.goal or not self.operators:
            return None
        try:
            domain = compile_domain(self.registry, self.operators)
        except Exception:
            return None
        problem = compile_problem(list(self.task.objects), state, self.goal)
        result = plan(domain, problem, heuristic=self.heuristic,
                      max_expansions=TRAIN_PLAN_EXPANSIONS)
        if result.ok and result.plan.actions:
            return result.plan.actions[0]
        return None

    def _random_action(self, state) -> Optional[GroundedAction]:
        candidates = [
            action for action in worldsim.grounded_actions(self.world)
            if self.ledger.satisfied(action, state)
        ]
        if not candidates:
            self.log("error", {"kind": "stalled",
                               "detail": "no symbolically feasible action"})
            return None
        return self.rng.choice(candidates)


# ---------------------------------------------------------------------------
# Bundles


def write_bundle(session: Session, out_dir: str | Path,
                 task_list: list[Task]) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "predicates.pscript").write_text(session.registry.to_pscript())
    domain = compile_domain(session.registry, session.operators,
                            name=session.domain_id)
    (out / "domain.pddl").write_text(domain.serialize())
    (out / "preconds.json").write_text(
        json.dumps(session.ledger.to_json(), indent=2, sort_keys=True) + "\n"
    )
    with (out / "transitions.jsonl").open("w") as fh:
        for r in session.records:
            fh.write(json.dumps({
                "step": r.step,
                "action": str(r.action),
                "world_pre": r.world_pre.to_json(),
                "world_post": r.world_post.to_json(),
                "s_pre": sorted(str(l) for l in r.s_pre),
                "s_post": sorted(str(l) for l in r.s_post),
            }, sort_keys=True) + "\n")
    (out / "meta.json").write_text(json.dumps({
        "domain_id": session.domain_id,
        "seed": session.seed,
        "tasks": [t.to_json() for t in task_list],
        "feedback_events": session.feedback_count,
        "teacher_calls": session.teacher_calls,
        "transitions": len(session.records),
        "episodes": session.episode + 1,
        "episode_results": session.episode_results,
        "operators": [op.name for op in session.operators],
    }, indent=2, sort_keys=True) + "\n")
    return out


def run_training(domain_id: str, task_list: list[Task], teacher,
                 seed: int = 0,
                 oracle: Optional[FeedbackOracle] = None,
                 out_dir: Optional[str | Path] = None,
                 log_path: Optional[str | Path] = None,
                 initial_registry: Optional[PredicateRegistry] = None,
                 heuristic: str = "hmax") -> Session:
    log_fh = open(log_path, "w") if log_path else None

    def log_fn(event: dict) -> None:
        if log_fh:
            log_fh.write(json.dumps(event, sort_keys=True) + "\n")
            log_fh.flush()

    oracle = oracle or FeedbackOracle(domain_id)
    session = Session(domain_id, teacher, seed=seed, oracle=oracle,
                      initial_registry=initial_registry,
                      log_fn=log_fn if log_path else None,
                      heuristic=heuristic)
    try:
        for task in task_list:
            session.run_scripted_episode(task)
        if out_dir is not None:
            write_bundle(session, out_dir, task_list)
    finally:
        if log_fh:
            log_fh.close()
    return session


# ---------------------------------------------------------------------------
# Test-time execution


@dataclass(frozen=True)
class TestResult:
    success: bool
    reason: str = ""
    plan_length: int = 0
    plan_seconds: float = 0.0


def load_bundle(bundle_dir: str | Path):
    bundle = Path(bundle_dir)
    registry = PredicateRegistry.from_pscript(
        (bundle / "predicates.pscript").read_text()
    )
    domain = parse_pddl((bundle / "domain.pddl").read_text())
    meta = json.loads((bundle / "meta.json").read_text())
    return registry, domain, meta


def run_test(bundle_dir: str | Path, task: Task, translator,
             heuristic: str = "hmax",
             max_expansions: int = 100_000) -> TestResult:
    """Plan once with the learned domain, execute against ground truth.

    Any infeasible action ends the episode immediately; success is judged
    by the simulator, not by the learned predicates.
    """
    registry, domain, _ = load_bundle(bundle_dir)
    world = task.reset()
    objects = list(task.objects)
    try:
        goal = translator.translate_goal(task.utterance, registry, objects)
    except TeacherError as e:
        return TestResult(False, f"translation: {e}")
    try:
        init = parse_state(perceive(world), registry)
    except ExecError as e:
        return TestResult(False, f"predicate error: {e.message}")
    problem = compile_problem(objects, init, goal)
    result = plan(domain, problem, heuristic=heuristic,
                  max_expansions=max_expansions)
    if not result.ok:
        return TestResult(False, f"planner: {result.status}",
                          plan_seconds=result.elapsed)
    for action in result.plan.actions:
        verdict = worldsim.check_feasible(world, action)
        if not verdict.ok:
            return TestResult(
                False, f"infeasible {action} (check {verdict.check_id})",
                plan_length=result.plan.cost, plan_seconds=result.elapsed,
            )
        world = worldsim.execute(world, action)
    if goal_holds(world, task.goal):
        return TestResult(True, plan_length=result.plan.cost,
                          plan_seconds=result.elapsed)
    return TestResult(False, "goal not reached",
                      plan_length=result.plan.cost,
                      plan_seconds=result.elapsed)
