"""Predicate registry, symbolic-state parsing, and .pscript bundle IO.

Every registered predicate gets a structurally negated partner, so symbolic
states stay positive-only while each (predicate, args) pair appears with
exactly one polarity.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

from .ast import Definition, Node, Not, print_definition, print_program
from .checker import Checker, DslTypeError, Signature, BOOL, OBJ
from .interp import Evaluator, ExecError
from .parser import parse_program
from ..worldsim import PerceptionSnapshot

NEG_PREFIX = "neg_"

MAX_ARITY = 2


def negation_name(name: str) -> str:
    return name[len(NEG_PREFIX):] if name.startswith(NEG_PREFIX) else NEG_PREFIX + name


def is_negation(name: str) -> bool:
    return name.startswith(NEG_PREFIX)


class RegistryError(Exception):
    pass


@dataclass(frozen=True)
class UtilityFunction:
    name: str
    params: tuple[str, ...]
    body: Node
    description: str = ""

    def to_definition(self) -> Definition:
        return Definition("util", self.name, self.params, self.body,
                          self.description)


@dataclass(frozen=True)
class Predicate:
    name: str
    params: tuple[str, ...]
    description: str
    body: Node

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def polarity_partner(self) -> str:
        return negation_name(self.name)

    def to_definition(self) -> Definition:
        return Definition("pred", self.name, self.params, self.body,
                          self.description)


@dataclass(frozen=True, order=True)
class Literal:
    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"{self.predicate}({', '.join(self.args)})"

    @staticmethod
    def parse(text: str) -> "Literal":
        text = text.strip()
        name, rest = text.split("(", 1)
        inner = rest.rstrip(")").strip()
        args = tuple(a.strip() for a in inner.split(",")) if inner else ()
        return Literal(name.strip(), args)


SymbolicState = frozenset  # of Literal


class PredicateRegistry:
    """Copy-on-write collection of utilities and paired predicates."""

    def __init__(self):
        self.utilities: dict[str, UtilityFunction] = {}
        self.predicates: dict[str, Predicate] = {}
        self.version: int = 0

    def copy(self) -> "PredicateRegistry":
        new = PredicateRegistry()
        new.utilities = dict(self.utilities)
        new.predicates = dict(self.predicates)
        new.version = self.version
        return new

    # -- registration --------------------------------------------------------

    def _utility_sigs(self) -> dict[str, Signature]:
        checker = Checker()
        sigs = {}
        for u in self.utilities.values():
            d = u.to_definition()
            sigs[u.name] = Checker(sigs).check_definition(d)
        return sigs

    def register_utility(self, defn: Definition) -> None:
        if defn.kind != "util":
            raise RegistryError(f"{defn.name} is not a utility")
        if defn.name in self.utilities:
            raise RegistryError(f"utility {defn.name!r} already registered")
        Checker(self._utility_sigs()).check_definition(defn)
        self.utilities[defn.name] = UtilityFunction(
            defn.name, defn.params, defn.body, defn.description
        )
        self.version += 1

    def register_predicate(self, defn: Definition) -> Predicate:
        """Register a predicate and its structural negation partner."""
        if defn.kind != "pred":
            raise RegistryError(f"{defn.name} is not a predicate")
        if is_negation(defn.name):
            raise RegistryError(
                f"{defn.name!r}: negation partners are registered automatically"
            )
        if defn.name in self.predicates:
            raise RegistryError(f"predicate {defn.name!r} already registered")
        if len(defn.params) > MAX_ARITY:
            raise RegistryError(f"{defn.name}: arity above {MAX_ARITY}")
        sig = Checker(self._utility_sigs()).check_definition(defn)
        if sig.returns != BOOL:
            raise RegistryError(f"{defn.name}: predicate body must be bool")
        pred = Predicate(defn.name, defn.params, defn.description, defn.body)
        partner = Predicate(
            negation_name(defn.name),
            defn.params,
            f"opposite of: {defn.description}" if defn.description else "",
            Not(defn.body),
        )
        self.predicates[pred.name] = pred
        self.predicates[partner.name] = partner
        self.version += 1
        return pred

    def replace_predicate_body(self, name: str, body: Node) -> None:
        """Swap in a corrected body; the negation partner tracks it."""
        if name not in self.predicates or is_negation(name):
            raise RegistryError(f"no positive predicate {name!r}")
        pred = self.predicates[name]
        defn = Definition("pred", name, pred.params, body, pred.description)
        sig = Checker(self._utility_sigs()).check_definition(defn)
        if sig.returns != BOOL:
            raise RegistryError(f"{name}: corrected body must be bool")
        self.predicates[name] = replace(pred, body=body)
        partner = negation_name(name)
        self.predicates[partner] = replace(
            self.predicates[partner], body=Not(body)
        )
        self.version += 1

    def positive_predicates(self) -> list[Predicate]:
        return [
            p for n, p in sorted(self.predicates.items()) if not is_negation(n)
        ]

    def utility_definitions(self) -> dict[str, Definition]:
        return {n: u.to_definition() for n, u in sorted(self.utilities.items())}

    # -- evaluation -----------------------------------------------------------

    def evaluate(
        self, name: str, snapshot: PerceptionSnapshot, args: tuple[str, ...]
    ) -> bool:
        if name not in self.predicates:
            raise RegistryError(f"unknown predicate {name!r}")
        pred = self.predicates[name]
        if len(args) != pred.arity:
            raise RegistryError(
                f"{name} takes {pred.arity} args, got {len(args)}"
            )
        env = dict(zip(pred.params, args))
        evaluator = Evaluator(self.utility_definitions())
        try:
            return bool(evaluator.evaluate_body(pred.body, snapshot, env))
        except ExecError as e:
            raise ExecError(
                f"{name}({', '.join(args)}): {e.message}", e.trace
            ) from None

    # -- serialization ----------------------------------------------------------

    def to_pscript(self) -> str:
        defs = [u.to_definition() for _, u in sorted(self.utilities.items())]
        defs.extend(p.to_definition() for p in self.positive_predicates())
        return print_program(defs)

    @staticmethod
    def from_pscript(source: str) -> "PredicateRegistry":
        registry = PredicateRegistry()
        for defn in parse_program(source):
            if defn.kind == "util":
                registry.register_utility(defn)
            else:
                registry.register_predicate(defn)
        return registry


def _arg_tuples(objects: list[str], arity: int):
    if arity == 0:
        yield ()
    else:
        yield from itertools.permutations(sorted(objects), arity)


def parse_state(
    snapshot: PerceptionSnapshot,
    registry: PredicateRegistry,
    objects: list[str] | None = None,
) -> SymbolicState:
    """All positive literals over all ordered, repeat-free argument tuples."""
    names = sorted(objects) if objects is not None else snapshot.object_names()
    literals = set()
    for pred_name in sorted(registry.predicates):
        pred = registry.predicates[pred_name]
        for args in _arg_tuples(names, pred.arity):
            if registry.evaluate(pred_name, snapshot, args):
                literals.add(Literal(pred_name, args))
    return frozenset(literals)


def extensionally_equal(
    registry_p: PredicateRegistry,
    p_name: str,
    registry_q: PredicateRegistry,
    q_name: str,
    snapshots: list[PerceptionSnapshot],
) -> bool:
    """True iff the two predicates agree on every (snapshot, args) sample."""
    p = registry_p.predicates.get(p_name)
    q = registry_q.predicates.get(q_name)
    if p is None or q is None:
        raise RegistryError(f"unknown predicate {p_name if p is None else q_name!r}")
    if p.arity != q.arity:
        raise RegistryError(
            f"arity mismatch: {p_name}/{p.arity} vs {q_name}/{q.arity}"
        )
    for snap in snapshots:
        for args in _arg_tuples(snap.object_names(), p.arity):
            if registry_p.evaluate(p_name, snap, args) != registry_q.evaluate(
                q_name, snap, args
            ):
                return False
    return True
