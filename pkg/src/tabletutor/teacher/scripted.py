"""Deterministic template-driven teacher backend.

Parses exactly the phrasings the feedback oracle can emit (canonical
plus synonym variants); anything else raises UnparseableFeedback rather
than guessing.
"""
from __future__ import annotations

import re
from typing import Optional

from ..dsl import ast
from ..dsl.interp import ExecError
from ..dsl.ast import print_program
from ..dsl.parser import parse_expr, parse_program
from ..dsl.registry import Literal, PredicateRegistry
from ..worldsim import GroundedAction, PerceptionSnapshot
from . import library
from .types import (
    CorrectionFailed,
    FeedbackEvent,
    PreconditionLedger,
    ReasonerOutput,
    TeacherBackendConfig,
    TranslationError,
    UnknownPredicate,
    UnparseableFeedback,
)

from ..oracle import TEMPLATES


def _template_regex(template: str) -> re.Pattern:
    pattern = re.escape(template)
    for ph, group in (
        ("{a}", r"(?P<a>[\w ]+?)"),
        ("{b}", r"(?P<b>[\w ]+?)"),
        ("{action}", r"(?P<action>.+?)"),
        ("{reason}", r"(?P<reason>.+?)"),
    ):
        pattern = pattern.replace(re.escape(ph), group)
    return re.compile(pattern)


def _match_any(templates: list[str], text: str) -> Optional[dict]:
    for template in templates:
        m = _template_regex(template).fullmatch(text)
        if m:
            return m.groupdict()
    return None


def _extract_reason(kind: str, text: str) -> str:
    wrappers = TEMPLATES["wrappers"][kind]
    got = _match_any(wrappers, text)
    if got is None or "reason" not in got:
        raise UnparseableFeedback(f"unrecognized {kind} phrasing: {text!r}")
    return got["reason"]


_ARG_POSITION = {"a": 0, "b": 1}


class ScriptedTeacher:
    """Reasoner / Coder / Corrector / GoalTranslator, template edition."""

    def __init__(self, domain_id: str,
                 config: Optional[TeacherBackendConfig] = None):
        self.domain_id = domain_id
        self.config = config or TeacherBackendConfig()
        # predicates already coded once; drafts are only served the
        # first time a predicate is requested
        self._drafted: set[str] = set()

    # -- Reasoner -----------------------------------------------------------

    def reason(
        self,
        event: FeedbackEvent,
        registry: PredicateRegistry,
        objects: list[str],
        goal: Optional[list[tuple[Literal, bool]]] = None,
        ledger: Optional[PreconditionLedger] = None,
    ) -> ReasonerOutput:
        if event.kind == "goal_spec":
            return self._reason_goal_spec(event.text, registry, objects)
        if event.kind == "infeasible_action_explanation":
            return self._reason_infeasible(event, registry)
        if event.kind == "unsatisfied_goal_explanation":
            return self._reason_unsatisfied(event.text, registry, objects)
        if event.kind == "goal_achieved_signal":
            return ReasonerOutput(literal_labels=list(goal or []))
        if event.kind == "feasible_action_signal":
            labels = []
            if ledger is not None and event.subject_action is not None:
                labels = ledger.ground(event.subject_action)
            return ReasonerOutput(literal_labels=labels)
        raise UnparseableFeedback(f"unknown feedback kind {event.kind!r}")

    def _parse_goal_clauses(
        self, text: str, objects: list[str]
    ) -> list[tuple[str, Literal]]:
        """Returns (clause kind, grounded literal) per clause."""
        body = text.strip()
        if not body:
            raise UnparseableFeedback("empty goal text")
        if body.endswith("."):
            body = body[:-1]
        body = body[0].lower() + body[1:]
        out = []
        for clause in body.split(" and "):
            parsed = None
            for kind, spec in TEMPLATES["goal_clauses"].items():
                got = _match_any(spec["templates"], clause)
                if got is None:
                    continue
                args = tuple(
                    got[k] for k in ("a", "b") if got.get(k) is not None
                )
                if all(arg in objects for arg in args):
                    parsed = (kind, Literal(spec["predicate"], args))
                    break
            if parsed is None:
                raise UnparseableFeedback(
                    f"unrecognized goal clause: {clause!r}"
                )
            out.append(parsed)
        return out

    def _reason_goal_spec(self, text, registry, objects) -> ReasonerOutput:
        clauses = self._parse_goal_clauses(text, objects)
        new_descriptions = {}
        goal = []
        for _, literal in clauses:
            if literal.predicate not in registry.predicates:
                new_descriptions[literal.predicate] = library.description_of(
                    literal.predicate
                )
            goal.append((literal, True))
        return ReasonerOutput(
            new_predicate_descriptions=new_descriptions, symbolic_goal=goal
        )

    def _reason_infeasible(self, event, registry) -> ReasonerOutput:
        action = event.subject_action
        reason = _extract_reason("infeasible", event.text)
        checks = TEMPLATES["checks"][self.domain_id]
        for check_id in sorted(checks, key=int):
            entry = checks[check_id]
            got = _match_any(entry["templates"], reason)
            if got is None:
                continue
            positions = [_ARG_POSITION[x] for x in entry["args"]]
            if any(p >= len(action.args) for p in positions):
                continue
            ground_args = tuple(action.args[p] for p in positions)
            named = {k: v for k, v in got.items() if v is not None}
            if any(named[k] != action.args[_ARG_POSITION[k]] for k in named
                   if k in _ARG_POSITION):
                continue
            pred = entry["predicate"]
            value = entry["value"]
            pattern = Literal(pred, tuple(f"v{p}" for p in positions))
            new_descriptions = {}
            if pred not in registry.predicates:
                new_descriptions[pred] = library.description_of(pred)
            return ReasonerOutput(
                new_predicate_descriptions=new_descriptions,
                literal_labels=[(Literal(pred, ground_args), not value)],
                new_action_preconditions=(action.schema, [(pattern, value)]),
            )
        raise UnparseableFeedback(
            f"unrecognized infeasibility reason: {reason!r}"
        )

    def _reason_unsatisfied(self, text, registry, objects) -> ReasonerOutput:
        reason = _extract_reason("unsatisfied", text)
        for kind, spec in TEMPLATES["unsatisfied_clauses"].items():
            got = _match_any(spec["templates"], reason)
            if got is None:
                continue
            args = tuple(got[k] for k in ("a", "b") if got.get(k) is not None)
            if not all(arg in objects for arg in args):
                continue
            pred = spec["predicate"]
            new_descriptions = {}
            if pred not in registry.predicates:
                new_descriptions[pred] = library.description_of(pred)
            return ReasonerOutput(
                new_predicate_descriptions=new_descriptions,
                literal_labels=[(Literal(pred, args), False)],
            )
        raise UnparseableFeedback(
            f"unrecognized unsatisfied-goal reason: {reason!r}"
        )

    # -- Coder --------------------------------------------------------------

    def code(self, descriptions: dict[str, str],
             registry: PredicateRegistry) -> dict[str, str]:
        out = {}
        for name, description in sorted(descriptions.items()):
            if name in registry.predicates:
                raise ValueError(f"{name} is already registered")
            entry = library.BY_DESCRIPTION.get(description)
            if entry is None:
                raise UnknownPredicate(
                    f"no reference implementation for {description!r}"
                )
            body = None
            if (self.config.miscalibrated_drafts and entry.draft
                    and entry.name not in self._drafted):
                body = entry.draft
                self._drafted.add(entry.name)
            out[name] = library.program_source(
                entry, body=body,
                known_utilities=frozenset(registry.utilities),
            )
        return out

    # -- Corrector ------------------------------------------------------------

    def correct_execution(self, program: str, trace: str) -> str:
        """Mechanical rewrites for the two runtime-error classes the
        interpreter can produce on well-typed programs."""
        definitions = parse_program(program)
        fixed = []
        for defn in definitions:
            body = defn.body
            if "out of range" in trace:
                body = _clamp_indices(body)
            if "division by zero" in trace:
                body = _guard_division(body)
            fixed.append(ast.Definition(defn.kind, defn.name, defn.params,
                                        body, defn.description))
        return print_program(fixed)

    def correct_alignment(
        self,
        registry: PredicateRegistry,
        labels: list[tuple[PerceptionSnapshot, Literal, bool]],
    ) -> dict[str, ast.Node]:
        """Pick, per disagreeing predicate, the first variant body that
        satisfies every stored label. Returns replacement bodies."""
        offenders = sorted(
            {lit.predicate for snap, lit, value in labels
             if self._predicts(registry, snap, lit) != value}
        )
        replacements: dict[str, ast.Node] = {}
        for name in offenders:
            entry = library.BY_NAME.get(name)
            candidates = list(entry.variants) if entry and entry.variants \
                else ([entry.body] if entry else [])
            fixed = None
            for candidate in candidates:
                trial = registry.copy()
                body = _parse_body(entry, candidate)
                trial.replace_predicate_body(name, body)
                if all(
                    self._predicts(trial, snap, lit) == value
                    for snap, lit, value in labels
                    if lit.predicate == name
                ):
                    fixed = body
                    break
            if fixed is None:
                bad = [(str(lit), value) for _, lit, value in labels
                       if lit.predicate == name]
                raise CorrectionFailed(
                    f"no variant of {name} fits all labels: {bad}"
                )
            replacements[name] = fixed
        return replacements

    @staticmethod
    def _predicts(registry, snapshot, literal) -> bool:
        return registry.evaluate(literal.predicate, snapshot, literal.args)

    # -- Goal translator --------------------------------------------------------

    def translate_goal(
        self, text: str, registry: PredicateRegistry, objects: list[str]
    ) -> list[tuple[Literal, bool]]:
        try:
            clauses = self._parse_goal_clauses(text, objects)
        except UnparseableFeedback as e:
            raise TranslationError(str(e)) from None
        goal = []
        for _, literal in clauses:
            if literal.predicate not in registry.predicates:
                raise TranslationError(
                    f"goal references unlearned predicate {literal.predicate}"
                )
            goal.append((literal, True))
        return goal


# -- AST rewrites used by correct_execution ------------------------------------


def _map_children(node: ast.Node, fn) -> ast.Node:
    if isinstance(node, ast.Call):
        return ast.Call(node.func, tuple(fn(a) for a in node.args))
    if isinstance(node, ast.Index):
        return ast.Index(fn(node.base), fn(node.index))
    if isinstance(node, ast.Unary):
        return ast.Unary(node.op, fn(node.operand))
    if isinstance(node, ast.Binop):
        return ast.Binop(node.op, fn(node.left), fn(node.right))
    if isinstance(node, ast.Not):
        return ast.Not(fn(node.operand))
    if isinstance(node, ast.If):
        return ast.If(fn(node.cond), fn(node.then), fn(node.orelse))
    if isinstance(node, ast.Quant):
        return ast.Quant(node.kind, node.var, fn(node.body))
    return node


def _clamp_indices(node: ast.Node) -> ast.Node:
    node = _map_children(node, _clamp_indices)
    if (isinstance(node, ast.Index) and isinstance(node.index, ast.Num)
            and node.index.value not in (0.0, 1.0)):
        return ast.Index(node.base, ast.Num(1.0))
    return node


def _guard_division(node: ast.Node) -> ast.Node:
    node = _map_children(node, _guard_division)
    if isinstance(node, ast.Binop) and node.op == "/":
        if isinstance(node.right, ast.Num):
            return node
        guarded = ast.Call("max", (node.right, ast.Num(0.0001)))
        return ast.Binop("/", node.left, guarded)
    return node


def _parse_body(entry: library.LibraryEntry, body_source: str) -> ast.Node:
    return parse_expr(body_source)
