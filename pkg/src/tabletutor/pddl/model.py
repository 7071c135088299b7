"""STRIPS domain/problem model, compiler from learned artifacts, serializer.

Negated conditions never appear: every predicate is declared together with
its neg_ partner, and parsed states carry both polarities.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..dsl.registry import Literal, PredicateRegistry, SymbolicState, is_negation, negation_name
from ..operators import Operator


class CompileError(Exception):
    pass


def mangle(name: str) -> str:
    """Object names may contain spaces; PDDL identifiers may not."""
    return name.replace(" ", "_")


def unmangle(name: str) -> str:
    return name.replace("_", " ")


@dataclass(frozen=True)
class PddlPredicate:
    name: str
    arity: int

    def serialize(self) -> str:
        params = "".join(f" ?v{i}" for i in range(self.arity))
        return f"({self.name}{params})"


@dataclass(frozen=True)
class PddlAction:
    name: str
    schema: str  # underlying primitive action
    params: tuple[str, ...]
    preconditions: frozenset  # of Literal over params
    eff_add: frozenset
    eff_del: frozenset

    def serialize(self) -> str:
        params = " ".join(f"?{p}" for p in self.params)
        pre = " ".join(_lit(l) for l in sorted(self.preconditions))
        add = [_lit(l) for l in sorted(self.eff_add)]
        dele = [f"(not {_lit(l)})" for l in sorted(self.eff_del)]
        eff = " ".join(add + dele)
        return (
            f"  (:action {self.name}\n"
            f"    :parameters ({params})\n"
            f"    :precondition (and {pre})\n"
            f"    :effect (and {eff})\n"
            f"  )"
        )


def _lit(l: Literal) -> str:
    args = "".join(
        f" ?{a}" if a.startswith("v") and a[1:].isdigit() else f" {mangle(a)}"
        for a in l.args
    )
    return f"({l.predicate}{args})"


@dataclass(frozen=True)
class PddlDomain:
    name: str
    predicates: tuple[PddlPredicate, ...]
    actions: tuple[PddlAction, ...]
    requirements: tuple[str, ...] = (":strips",)

    def serialize(self) -> str:
        preds = "\n    ".join(p.serialize() for p in self.predicates)
        actions = "\n".join(a.serialize() for a in self.actions)
        parts = [
            f"(define (domain {self.name})",
            f"  (:requirements {' '.join(self.requirements)})",
            f"  (:predicates\n    {preds}\n  )",
        ]
        if actions:
            parts.append(actions)
        parts.append(")")
        return "\n".join(parts) + "\n"

    def predicate_arity(self) -> dict[str, int]:
        return {p.name: p.arity for p in self.predicates}


@dataclass(frozen=True)
class PddlProblem:
    name: str
    domain_name: str
    objects: tuple[str, ...]
    init: frozenset  # of Literal with ground args
    goal: frozenset  # of Literal with ground args

    def serialize(self) -> str:
        objs = " ".join(mangle(o) for o in sorted(self.objects))
        init = "\n    ".join(_ground(l) for l in sorted(self.init))
        goal = " ".join(_ground(l) for l in sorted(self.goal))
        return (
            f"(define (problem {self.name})\n"
            f"  (:domain {self.domain_name})\n"
            f"  (:objects {objs})\n"
            f"  (:init\n    {init}\n  )\n"
            f"  (:goal (and {goal}))\n"
            f")\n"
        )


def _ground(l: Literal) -> str:
    args = "".join(f" {mangle(a)}" for a in l.args)
    return f"({l.predicate}{args})"


@dataclass(frozen=True)
class Plan:
    actions: tuple  # of GroundedAction

    @property
    def cost(self) -> int:
        return len(self.actions)


def compile_domain(
    registry: PredicateRegistry,
    operators: tuple[Operator, ...],
    name: str = "learned",
) -> PddlDomain:
    """Compile learned predicates and operators into a STRIPS domain."""
    arities = {p.name: p.arity for p in registry.predicates.values()}
    for op in operators:
        for lit in op.preconditions | op.eff_add | op.eff_del:
            if lit.predicate not in arities:
                raise CompileError(
                    f"operator {op.name} references unregistered predicate "
                    f"{lit.predicate!r}"
                )
    predicates = tuple(
        PddlPredicate(n, arities[n]) for n in sorted(arities)
    )
    actions = tuple(
        PddlAction(
            name=op.name,
            schema=op.schema,
            params=op.params,
            preconditions=op.preconditions,
            eff_add=op.eff_add,
            eff_del=op.eff_del,
        )
        for op in sorted(operators, key=lambda o: o.name)
    )
    return PddlDomain(name=name, predicates=predicates, actions=actions)


def compile_problem(
    objects: list[str],
    init: SymbolicState,
    goal: list[tuple[Literal, bool]],
    domain_name: str = "learned",
    name: str = "task",
) -> PddlProblem:
    """Negative goal targets are expressed through the neg_ partner."""
    goal_lits = set()
    for lit, value in goal:
        if value:
            goal_lits.add(lit)
        else:
            goal_lits.add(Literal(negation_name(lit.predicate), lit.args))
    return PddlProblem(
        name=name,
        domain_name=domain_name,
        objects=tuple(sorted(objects)),
        init=frozenset(init),
        goal=frozenset(goal_lits),
    )
