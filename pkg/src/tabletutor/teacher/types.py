"""Shared types for the teacher pipeline."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..dsl.registry import Literal, negation_name
from ..worldsim import GroundedAction


FEEDBACK_KINDS = (
    "goal_spec",
    "goal_achieved_signal",
    "unsatisfied_goal_explanation",
    "feasible_action_signal",
    "infeasible_action_explanation",
)

_ACTION_KINDS = ("feasible_action_signal", "infeasible_action_explanation")

# Feedback that costs the teacher actual effort: stating the goal and
# explaining failures. Bare yes/no signals ride along for free.
COUNTED_KINDS = (
    "goal_spec",
    "unsatisfied_goal_explanation",
    "infeasible_action_explanation",
)


class TeacherError(Exception):
    pass


class UnparseableFeedback(TeacherError):
    pass


class UnknownPredicate(TeacherError):
    pass


class CorrectionFailed(TeacherError):
    pass


class TranslationError(TeacherError):
    pass


@dataclass(frozen=True)
class FeedbackEvent:
    kind: str
    text: str
    subject_action: Optional[GroundedAction] = None
    step: int = 0

    def __post_init__(self):
        if self.kind not in FEEDBACK_KINDS:
            raise ValueError(f"unknown feedback kind {self.kind!r}")
        if (self.subject_action is not None) != (self.kind in _ACTION_KINDS):
            raise ValueError(
                f"{self.kind}: subject_action must be present exactly for "
                "action-related feedback"
            )

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "text": self.text,
            "subject_action": str(self.subject_action)
            if self.subject_action else None,
            "step": self.step,
        }


@dataclass
class ReasonerOutput:
    new_predicate_descriptions: dict[str, str] = field(default_factory=dict)
    literal_labels: list[tuple[Literal, bool]] = field(default_factory=list)
    # (action schema, [(pattern literal over v0/v1, required value)])
    new_action_preconditions: Optional[
        tuple[str, list[tuple[Literal, bool]]]
    ] = None
    symbolic_goal: Optional[list[tuple[Literal, bool]]] = None


class PreconditionLedger:
    """Per-schema required literals distilled from rejections.

    Pattern literal args are v0/v1, the action's own argument positions;
    nothing else may be referenced. Grows monotonically and deduplicates.
    """

    def __init__(self):
        self._entries: dict[str, list[tuple[Literal, bool]]] = {}

    def add(self, schema: str, pattern: Literal, value: bool) -> bool:
        for arg in pattern.args:
            if not (arg.startswith("v") and arg[1:].isdigit()):
                raise ValueError(
                    f"ledger pattern arg {arg!r} is not an action argument"
                )
        bucket = self._entries.setdefault(schema, [])
        if (pattern, value) in bucket:
            return False
        bucket.append((pattern, value))
        bucket.sort(key=lambda e: (str(e[0]), e[1]))
        return True

    def entries(self, schema: str) -> list[tuple[Literal, bool]]:
        return list(self._entries.get(schema, []))

    def schemas(self) -> list[str]:
        return sorted(self._entries)

    def as_dict(self) -> dict[str, list[tuple[Literal, bool]]]:
        return {s: list(v) for s, v in self._entries.items()}

    def ground(self, action: GroundedAction) -> list[tuple[Literal, bool]]:
        out = []
        for pattern, value in self._entries.get(action.schema, []):
            args = tuple(action.args[int(a[1:])] for a in pattern.args)
            out.append((Literal(pattern.predicate, args), value))
        return out

    def satisfied(self, action: GroundedAction, state: frozenset) -> bool:
        """Check against a symbolic state of positive literals."""
        for lit, value in self.ground(action):
            want = lit if value else Literal(
                negation_name(lit.predicate), lit.args
            )
            if want not in state:
                return False
        return True

    def to_json(self) -> dict:
        return {
            schema: [[str(lit), value] for lit, value in entries]
            for schema, entries in sorted(self._entries.items())
        }

    @staticmethod
    def from_json(data: dict) -> "PreconditionLedger":
        ledger = PreconditionLedger()
        for schema, entries in data.items():
            for text, value in entries:
                ledger.add(schema, Literal.parse(text), value)
        return ledger


@dataclass
class TeacherBackendConfig:
    backend: str = "scripted"
    endpoint: str = ""
    model: str = ""
    api_key_env: str = "TEACHER_API_KEY"
    max_correction_iterations: int = 3
    request_timeout: float = 60.0
    # deliberately ship a buggy/miscalibrated first draft of some
    # predicates so the correction loop gets exercised
    miscalibrated_drafts: bool = False

    def __post_init__(self):
        if self.backend not in ("scripted", "remote"):
            raise ValueError(f"unknown teacher backend {self.backend!r}")
        if self.max_correction_iterations < 1:
            raise ValueError("max_correction_iterations must be >= 1")
