"""The scripted human: ground-truth goal specs, action verdicts and
success verdicts, phrased from a template file.

Varied mode samples one of the synonym phrasings per event from a seeded
stream; canonical mode always uses the first phrasing.
"""
from __future__ import annotations

import json
import random
from importlib import resources

from . import worldsim
from .tasks import GoalAtom, Task, goal_holds
from .teacher.types import FeedbackEvent
from .worldsim import GroundedAction, WorldState


def load_templates() -> dict:
    text = (
        resources.files("tabletutor.data") / "feedback_templates.json"
    ).read_text()
    return json.loads(text)


TEMPLATES = load_templates()


def _render_clause(atom: GoalAtom, template: str) -> str:
    values = {"a": atom.args[0]}
    if len(atom.args) > 1:
        values["b"] = atom.args[1]
    return template.format(**values)


class FeedbackOracle:
    """Deterministic given (domain, goal, variant seed)."""

    def __init__(self, domain_id: str, variant_mode: str = "canonical",
                 seed: int = 0):
        if variant_mode not in ("canonical", "varied"):
            raise ValueError(f"unknown variant mode {variant_mode!r}")
        if domain_id not in TEMPLATES["checks"]:
            raise ValueError(f"no templates for domain {domain_id!r}")
        self.domain_id = domain_id
        self.variant_mode = variant_mode
        self._rng = random.Random(f"oracle:{domain_id}:{seed}")

    def _pick(self, options: list[str]) -> str:
        if self.variant_mode == "canonical":
            return options[0]
        return self._rng.choice(options)

    def specify_goal(self, task: Task, step: int = 0) -> FeedbackEvent:
        clauses = []
        for atom in task.goal:
            template = self._pick(
                TEMPLATES["goal_clauses"][atom.kind]["templates"]
            )
            clauses.append(_render_clause(atom, template))
        text = " and ".join(clauses)
        text = text[0].upper() + text[1:] + "."
        return FeedbackEvent(kind="goal_spec", text=text, step=step)

    def verify_action(self, world: WorldState, action: GroundedAction,
                      step: int = 0) -> FeedbackEvent:
        verdict = worldsim.check_feasible(world, action)
        if verdict.ok:
            text = self._pick(TEMPLATES["wrappers"]["feasible"]).format(
                action=str(action)
            )
            return FeedbackEvent(
                kind="feasible_action_signal", text=text,
                subject_action=action, step=step,
            )
        entry = TEMPLATES["checks"][self.domain_id][str(verdict.check_id)]
        values = {"a": action.args[0]}
        if len(action.args) > 1:
            values["b"] = action.args[1]
        reason = self._pick(entry["templates"]).format(**values)
        text = self._pick(TEMPLATES["wrappers"]["infeasible"]).format(
            action=str(action), reason=reason
        )
        return FeedbackEvent(
            kind="infeasible_action_explanation", text=text,
            subject_action=action, step=step,
        )

    def verify_success(self, world: WorldState, goal: tuple[GoalAtom, ...],
                       step: int = 0) -> FeedbackEvent:
        for atom in goal:
            if not atom.holds(world):
                template = self._pick(
                    TEMPLATES["unsatisfied_clauses"][atom.kind]["templates"]
                )
                reason = _render_clause(atom, template)
                text = self._pick(TEMPLATES["wrappers"]["unsatisfied"]).format(
                    reason=reason
                )
                return FeedbackEvent(
                    kind="unsatisfied_goal_explanation", text=text, step=step
                )
        text = self._pick(TEMPLATES["wrappers"]["achieved"])
        return FeedbackEvent(kind="goal_achieved_signal", text=text, step=step)

    def goal_achieved(self, world: WorldState,
                      goal: tuple[GoalAtom, ...]) -> bool:
        return goal_holds(world, goal)
