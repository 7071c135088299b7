"""Forward-search planner over ground STRIPS.

A* with a choice of heuristic. hmax is admissible, so unit-cost plans it
returns are optimal; the blind heuristic gives plain uniform-cost search
and goal_count is fast but inadmissible (kept for experiments only).
"""
from __future__ import annotations

import heapq
import itertools
import time
from collections import deque
from dataclasses import dataclass

from ..dsl.registry import Literal
from ..worldsim import ACTION_ARITY, GroundedAction
from .model import Plan, PddlAction, PddlDomain, PddlProblem


@dataclass(frozen=True)
class GroundAction:
    name: str
    schema: str
    args: tuple[str, ...]
    preconditions: frozenset
    eff_add: frozenset
    eff_del: frozenset

    def to_world_action(self) -> GroundedAction:
        from ..worldsim import ACTION_ARITY

        return GroundedAction(self.schema, self.args[:ACTION_ARITY[self.schema]])


def ground_actions(domain: PddlDomain, objects: tuple[str, ...]) -> list[GroundAction]:
    """All bindings of distinct objects to each action's parameters."""
    out: list[GroundAction] = []
    for action in domain.actions:
        for combo in itertools.permutations(sorted(objects), len(action.params)):
            sub = dict(zip(action.params, combo))
            out.append(
                GroundAction(
                    name=action.name,
                    schema=action.schema,
                    args=combo,
                    preconditions=frozenset(_bind(l, sub) for l in action.preconditions),
                    eff_add=frozenset(_bind(l, sub) for l in action.eff_add),
                    eff_del=frozenset(_bind(l, sub) for l in action.eff_del),
                )
            )
    return out


def _bind(lit: Literal, sub: dict[str, str]) -> Literal:
    return Literal(lit.predicate, tuple(sub.get(a, a) for a in lit.args))


def _apply(state: frozenset, ga: GroundAction) -> frozenset:
    return (state - ga.eff_del) | ga.eff_add


def _h_blind(state: frozenset, goal: frozenset, actions) -> int:
    return 0 if goal <= state else 1


def _h_goal_count(state: frozenset, goal: frozenset, actions) -> int:
    return len(goal - state)


def _h_max(state: frozenset, goal: frozenset, actions) -> float:
    """Delete-relaxation fixpoint: cost of the most expensive goal fact."""
    cost: dict[Literal, float] = {f: 0.0 for f in state}
    changed = True
    while changed:
        changed = False
        for ga in actions:
            if any(p not in cost for p in ga.preconditions):
                continue
            c = max((cost[p] for p in ga.preconditions), default=0.0) + 1.0
            for f in ga.eff_add:
                if cost.get(f, float("inf")) > c:
                    cost[f] = c
                    changed = True
    worst = 0.0
    for f in goal:
        if f not in cost:
            return float("inf")
        worst = max(worst, cost[f])
    return worst


_HEURISTICS = {"hmax": _h_max, "blind": _h_blind, "goal_count": _h_goal_count}


@dataclass
class PlanResult:
    status: str  # "plan" | "unsolvable" | "budget_exceeded"
    plan: Plan | None
    expansions: int
    elapsed: float

    @property
    def ok(self) -> bool:
        return self.status == "plan"


def plan(
    domain: PddlDomain,
    problem: PddlProblem,
    heuristic: str = "hmax",
    max_expansions: int = 200_000,
) -> PlanResult:
    if heuristic not in _HEURISTICS:
        raise ValueError(f"unknown heuristic {heuristic!r}")
    h = _HEURISTICS[heuristic]
    start_time = time.monotonic()
    actions = ground_actions(domain, problem.objects)
    init = frozenset(problem.init)
    goal = frozenset(problem.goal)

    h0 = h(init, goal, actions)
    counter = itertools.count()
    # (f, g, tiebreak) keeps expansion order deterministic
    open_heap = [(h0, 0, next(counter), init, ())]
    best_g = {init: 0}
    expansions = 0
    while open_heap:
        f, g, _, state, path = heapq.heappop(open_heap)
        if g > best_g.get(state, float("inf")):
            continue
        if goal <= state:
            return PlanResult(
                status="plan",
                plan=Plan(tuple(ga.to_world_action() for ga in path)),
                expansions=expansions,
                elapsed=time.monotonic() - start_time,
            )
        if expansions >= max_expansions:
            return PlanResult("budget_exceeded", None, expansions,
                              time.monotonic() - start_time)
        expansions += 1
        for ga in actions:
            if not ga.preconditions <= state:
                continue
            nxt = _apply(state, ga)
            ng = g + 1
            if ng >= best_g.get(nxt, float("inf")):
                continue
            best_g[nxt] = ng
            hv = h(nxt, goal, actions)
            if hv == float("inf"):
                continue
            heapq.heappush(open_heap, (ng + hv, ng, next(counter), nxt, path + (ga,)))
    return PlanResult("unsolvable", None, expansions, time.monotonic() - start_time)


def bfs_plan(
    domain: PddlDomain,
    problem: PddlProblem,
    max_states: int = 2_000_000,
) -> PlanResult:
    """Breadth-first oracle. Slow, but trivially optimal for unit costs."""
    start_time = time.monotonic()
    actions = ground_actions(domain, problem.objects)
    init = frozenset(problem.init)
    goal = frozenset(problem.goal)
    if goal <= init:
        return PlanResult("plan", Plan(()), 0, time.monotonic() - start_time)
    seen = {init}
    queue = deque([(init, ())])
    expansions = 0
    while queue:
        state, path = queue.popleft()
        if expansions >= max_states:
            return PlanResult("budget_exceeded", None, expansions,
                              time.monotonic() - start_time)
        expansions += 1
        for ga in actions:
            if not ga.preconditions <= state:
                continue
            nxt = _apply(state, ga)
            if nxt in seen:
                continue
            npath = path + (ga,)
            if goal <= nxt:
                return PlanResult(
                    "plan",
                    Plan(tuple(x.to_world_action() for x in npath)),
                    expansions,
                    time.monotonic() - start_time,
                )
            seen.add(nxt)
            queue.append((nxt, npath))
    return PlanResult("unsolvable", None, expansions, time.monotonic() - start_time)


def validate_plan(domain: PddlDomain, problem: PddlProblem, the_plan: Plan) -> bool:
    """Check a plan step by step against the ground model.

    Plan steps carry only the action arguments; operators may bind extra
    free parameters, so each step matches any grounding that agrees on the
    action arguments and whose preconditions hold.
    """
    by_key: dict[tuple, list[GroundAction]] = {}
    for ga in ground_actions(domain, problem.objects):
        arity = ACTION_ARITY[ga.schema]
        by_key.setdefault((ga.schema, ga.args[:arity]), []).append(ga)
    state = frozenset(problem.init)
    for act in the_plan.actions:
        candidates = by_key.get((act.schema, act.args), ())
        ga = next((g for g in sorted(candidates, key=lambda g: (g.name, g.args))
                   if g.preconditions <= state), None)
        if ga is None:
            return False
        state = _apply(state, ga)
    return frozenset(problem.goal) <= state
