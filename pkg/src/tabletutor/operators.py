"""Lifted operator induction from successful transitions.

Transitions are clustered by their lifted effect signature, preconditions
are initialized to the intersection of lifted pre-states, then greedily
minimized subject to: unique explanation, no two operators with equal
preconditions but different effects, and teacher-provided preconditions
always retained.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Optional

from .dsl.registry import Literal, SymbolicState
from .worldsim import GroundedAction, ACTION_ARITY


@dataclass(frozen=True)
class Transition:
    s_pre: SymbolicState
    action: GroundedAction
    s_post: SymbolicState
    step: int = 0
    registry_version: int = 0

    @property
    def eff_add(self) -> frozenset:
        return self.s_post - self.s_pre

    @property
    def eff_del(self) -> frozenset:
        return self.s_pre - self.s_post


@dataclass(frozen=True)
class Operator:
    name: str
    schema: str
    params: tuple[str, ...]
    preconditions: frozenset  # of Literal over params
    eff_add: frozenset
    eff_del: frozenset

    def __str__(self) -> str:
        def fmt(lits):
            return "{" + ", ".join(str(l) for l in sorted(lits)) + "}"

        return (
            f"{self.name}({', '.join(self.params)}): "
            f"CON={fmt(self.preconditions)} "
            f"EFF+={fmt(self.eff_add)} EFF-={fmt(self.eff_del)}"
        )


@dataclass(frozen=True)
class LearnDiagnostics:
    contradictory: tuple = ()  # pairs of conflicting transitions
    unexplained: tuple = ()


@dataclass(frozen=True)
class LearnResult:
    operators: tuple[Operator, ...]
    diagnostics: LearnDiagnostics = LearnDiagnostics()


def _var(i: int) -> str:
    return f"v{i}"


def lift_effects(transition: Transition):
    """Canonical lifted effect signature and parameter objects.

    Variables are assigned to the action arguments first (positional order),
    then to remaining effect objects in first-appearance order over the
    lexicographically sorted effect literals.
    """
    mapping: dict[str, str] = {}
    for arg in transition.action.args:
        if arg not in mapping:
            mapping[arg] = _var(len(mapping))
    tagged = sorted(
        [("+", lit) for lit in transition.eff_add]
        + [("-", lit) for lit in transition.eff_del],
        key=lambda t: (t[1].predicate, t[1].args, t[0]),
    )
    for _, lit in tagged:
        for obj in lit.args:
            if obj not in mapping:
                mapping[obj] = _var(len(mapping))
    lifted_add = frozenset(_lift_literal(l, mapping) for l in transition.eff_add)
    lifted_del = frozenset(_lift_literal(l, mapping) for l in transition.eff_del)
    params = tuple(sorted(mapping.values(), key=lambda v: int(v[1:])))
    objects = tuple(sorted(mapping, key=lambda o: int(mapping[o][1:])))
    signature = (transition.action.schema, lifted_add, lifted_del)
    return signature, params, objects


def _lift_literal(lit: Literal, mapping: dict[str, str]) -> Literal:
    return Literal(lit.predicate, tuple(mapping[a] for a in lit.args))


def _ground_literal(lit: Literal, sub: dict[str, str]) -> Literal:
    return Literal(lit.predicate, tuple(sub[v] for v in lit.args))


def _lift_state(state: SymbolicState, objects_to_vars: dict[str, str]) -> frozenset:
    """Literals of the state whose objects all map to parameters."""
    out = set()
    for lit in state:
        if all(a in objects_to_vars for a in lit.args):
            out.add(_lift_literal(lit, objects_to_vars))
    return frozenset(out)


def explains(operator: Operator, transition: Transition) -> Optional[dict[str, str]]:
    """First substitution (canonical variable order) explaining the transition."""
    if operator.schema != transition.action.schema:
        return None
    arity = ACTION_ARITY[operator.schema]
    sub: dict[str, str] = {}
    for i, arg in enumerate(transition.action.args):
        var = _var(i)
        if var in sub and sub[var] != arg:
            return None
        sub[var] = arg
    free = [v for v in operator.params if v not in sub]
    scene = sorted(
        {a for lit in transition.s_pre | transition.s_post for a in lit.args}
        | set(transition.action.args)
    )
    candidates = [o for o in scene if o not in sub.values()]
    for combo in itertools.permutations(candidates, len(free)):
        full = dict(sub)
        full.update(zip(free, combo))
        if _check_explanation(operator, transition, full):
            return full
    if not free and _check_explanation(operator, transition, sub):
        return sub
    return None


def _check_explanation(op: Operator, t: Transition, sub: dict[str, str]) -> bool:
    if len(set(sub.values())) != len(sub):
        return False
    grounded_con = {_ground_literal(l, sub) for l in op.preconditions}
    if not grounded_con <= t.s_pre:
        return False
    grounded_add = frozenset(_ground_literal(l, sub) for l in op.eff_add)
    grounded_del = frozenset(_ground_literal(l, sub) for l in op.eff_del)
    return grounded_add == t.eff_add and grounded_del == t.eff_del


def _groundings(op: Operator, t: Transition):
    """All injective substitutions binding the action args positionally."""
    sub: dict[str, str] = {}
    for i, arg in enumerate(t.action.args):
        var = _var(i)
        if var in sub and sub[var] != arg:
            return
        sub[var] = arg
    free = [v for v in op.params if v not in sub]
    if not free:
        yield sub
        return
    scene = sorted(
        {a for lit in t.s_pre | t.s_post for a in lit.args}
        | set(t.action.args)
    )
    candidates = [o for o in scene if o not in sub.values()]
    for combo in itertools.permutations(candidates, len(free)):
        full = dict(sub)
        full.update(zip(free, combo))
        yield full


def _mispredicts(op: Operator, transitions: list[Transition]) -> bool:
    """True iff some grounding of op is applicable in a transition's
    pre-state but predicts different effects than what happened.

    This is what keeps minimized preconditions sound: wherever the
    operator claims to apply on observed data, it must be right.
    """
    for t in transitions:
        if t.action.schema != op.schema:
            continue
        for sub in _groundings(op, t):
            grounded_con = {_ground_literal(l, sub) for l in op.preconditions}
            if not grounded_con <= t.s_pre:
                continue
            grounded_add = frozenset(
                _ground_literal(l, sub) for l in op.eff_add
            )
            grounded_del = frozenset(
                _ground_literal(l, sub) for l in op.eff_del
            )
            if grounded_add != t.eff_add or grounded_del != t.eff_del:
                return True
    return False


@dataclass
class _Cluster:
    signature: tuple
    params: tuple[str, ...]
    members: list  # transitions
    subs: list  # object->var mapping per member
    con_init: frozenset = frozenset()


def _ledger_literals(
    ledger: dict[str, list[tuple[Literal, bool]]] | None, schema: str
) -> frozenset:
    """Ledger entries as lifted literals over action-arg variables.

    A (pattern, False) requirement is carried by the negation partner so
    precondition sets stay positive-only.
    """
    from .dsl.registry import negation_name

    if not ledger or schema not in ledger:
        return frozenset()
    out = set()
    for lit, value in ledger[schema]:
        if value:
            out.add(lit)
        else:
            out.add(Literal(negation_name(lit.predicate), lit.args))
    return frozenset(out)


def learn_operators(
    transitions: list[Transition],
    ledger: dict[str, list[tuple[Literal, bool]]] | None = None,
) -> LearnResult:
    """Cluster-and-search operator learning; deterministic throughout."""
    contradictory = []
    chosen: dict[tuple, Transition] = {}
    ordered = sorted(
        transitions, key=lambda t: (t.step, t.action.schema, t.action.args)
    )
    for t in ordered:
        key = (t.action.schema, t.action.args, t.s_pre)
        if key in chosen and chosen[key].s_post != t.s_post:
            contradictory.append((chosen[key], t))
        chosen[key] = t  # later transition wins
    kept = sorted(
        chosen.values(), key=lambda t: (t.step, t.action.schema, t.action.args)
    )

    clusters: dict[tuple, _Cluster] = {}
    for t in kept:
        signature, params, objects = lift_effects(t)
        mapping = {o: _var(i) for i, o in enumerate(objects)}
        cluster = clusters.get(signature)
        if cluster is None:
            cluster = _Cluster(signature, params, [], [])
            clusters[signature] = cluster
        cluster.members.append(t)
        cluster.subs.append(mapping)

    for cluster in clusters.values():
        lifted_pres = [
            _lift_state(t.s_pre, sub)
            for t, sub in zip(cluster.members, cluster.subs)
        ]
        con = frozenset.intersection(*lifted_pres)
        cluster.con_init = con

    order = sorted(clusters, key=_signature_key)
    ops: dict[tuple, Operator] = {}
    for sig in order:
        cluster = clusters[sig]
        schema, add, delete = sig
        required = _ledger_literals(ledger, schema)
        ops[sig] = Operator(
            name=f"{schema}__{order.index(sig)}",
            schema=schema,
            params=cluster.params,
            preconditions=cluster.con_init | required,
            eff_add=add,
            eff_del=delete,
        )

    # Greedy deletion to a fixed point, in lexicographic literal order.
    for sig in order:
        schema = sig[0]
        required = _ledger_literals(ledger, schema)
        changed = True
        while changed:
            changed = False
            for lit in sorted(ops[sig].preconditions - required):
                candidate = replace(
                    ops[sig],
                    preconditions=ops[sig].preconditions - {lit},
                )
                if _constraints_ok(candidate, sig, ops) and not _mispredicts(
                        candidate, kept):
                    ops[sig] = candidate
                    changed = True
    named = _rename(ops, order)
    unexplained = tuple(
        t for t in kept if not any(explains(op, t) for op in named)
    )
    return LearnResult(
        operators=named,
        diagnostics=LearnDiagnostics(
            contradictory=tuple(contradictory), unexplained=unexplained
        ),
    )


def _signature_key(sig):
    schema, add, delete = sig
    return (
        schema,
        tuple(sorted((l.predicate, l.args) for l in add)),
        tuple(sorted((l.predicate, l.args) for l in delete)),
    )


def _constraints_ok(candidate: Operator, sig, ops: dict) -> bool:
    """No other operator of the same schema with equal CON but different effects."""
    for other_sig, other in ops.items():
        if other_sig == sig or other.schema != candidate.schema:
            continue
        if other.preconditions == candidate.preconditions:
            return False
    return True


def _rename(ops: dict, order: list) -> tuple[Operator, ...]:
    counters: dict[str, int] = {}
    out = []
    for sig in order:
        op = ops[sig]
        n = counters.get(op.schema, 0)
        counters[op.schema] = n + 1
        suffix = f"_{n}" if any(
            o[0] == op.schema and o != sig for o in order
        ) else ""
        out.append(replace(op, name=f"{op.schema}{suffix}"))
    return tuple(out)


def minimal_preconditions_bruteforce(
    transitions: list[Transition],
    ledger: dict[str, list[tuple[Literal, bool]]] | None = None,
    max_extra: int = 12,
) -> Optional[int]:
    """Oracle: minimum total non-ledger precondition cardinality over all
    constraint-satisfying assignments. Exponential; desk-scale inputs only."""
    base = learn_operators(transitions, ledger)
    # Recover clusters from the greedy result's signatures.
    clusters = []
    for op in base.operators:
        sig = (op.schema, op.eff_add, op.eff_del)
        clusters.append((sig, op))
    # Per-cluster CON_init (re-derive).
    chosen: dict[tuple, Transition] = {}
    for t in sorted(transitions, key=lambda t: (t.step, t.action.schema, t.action.args)):
        chosen[(t.action.schema, t.action.args, t.s_pre)] = t
    inits = {}
    for t in chosen.values():
        signature, params, objects = lift_effects(t)
        mapping = {o: _var(i) for i, o in enumerate(objects)}
        lifted = _lift_state(t.s_pre, mapping)
        inits[signature] = (
            lifted if signature not in inits else inits[signature] & lifted
        )

    per_cluster_subsets = []
    for sig, op in clusters:
        required = _ledger_literals(ledger, sig[0])
        extra_pool = sorted(inits[sig] - required)
        subsets_by_size = []
        for k in range(0, min(len(extra_pool), max_extra) + 1):
            subsets_by_size.append(
                [frozenset(c) | required for c in itertools.combinations(extra_pool, k)]
            )
        per_cluster_subsets.append((sig, op, subsets_by_size))

    kept = sorted(
        chosen.values(),
        key=lambda t: (t.step, t.action.schema, t.action.args),
    )
    best = _search_joint(per_cluster_subsets, 0, [], kept)
    return best


def _search_joint(clusters, idx, chosen, transitions):
    if idx == len(clusters):
        return sum(c[1] for c in chosen)
    sig, op, subsets_by_size = clusters[idx]
    best = None
    for size, subsets in enumerate(subsets_by_size):
        for con in subsets:
            # constraint (ii) against already-chosen assignments
            collide = any(
                other_con == con and other_sig[0] == sig[0] and other_sig != sig
                for other_sig, _, other_con in chosen
            )
            if collide:
                continue
            if _mispredicts(replace(op, preconditions=con), transitions):
                continue
            sub_best = _search_joint(
                clusters, idx + 1, chosen + [(sig, size, con)], transitions
            )
            if sub_best is not None and (best is None or sub_best < best):
                best = sub_best
        if best is not None:
            break  # sizes ascend; smallest feasible size per cluster is optimal
    return best
