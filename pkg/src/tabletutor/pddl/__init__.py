from .model import (
    PddlPredicate,
    PddlAction,
    PddlDomain,
    PddlProblem,
    Plan,
    CompileError,
    compile_domain,
    compile_problem,
    mangle,
    unmangle,
)
from .parser import parse_pddl, PddlParseError, UnsupportedFeature
from .planner import (
    PlanResult,
    plan,
    validate_plan,
    ground_actions,
    bfs_plan,
)

__all__ = [
    "PddlPredicate", "PddlAction", "PddlDomain", "PddlProblem", "Plan",
    "CompileError", "compile_domain", "compile_problem", "mangle", "unmangle",
    "parse_pddl", "PddlParseError", "UnsupportedFeature",
    "PlanResult", "plan", "validate_plan", "ground_actions", "bfs_plan",
]
