"""Tree-walking evaluator for predicate programs.

Evaluation is pure: a function of (program, snapshot, arguments). Runtime
failures raise ExecError carrying an evaluation trace, which feeds the
correction loop.
"""
from __future__ import annotations

from .ast import (
    Binop, Bool, Call, Definition, If, Index, Name, Node, Not, Num, Quant,
    Str, Unary, print_expr,
)
from ..worldsim import ObjectNotFound, PerceptionSnapshot


class ExecError(Exception):
    def __init__(self, message: str, trace: list[str] | None = None):
        self.trace = list(trace or [])
        self.message = message
        super().__init__(message)

    def formatted(self) -> str:
        lines = [f"execution error: {self.message}"]
        lines.extend(f"  in {frame}" for frame in self.trace)
        return "\n".join(lines)


_BUILTIN_DISPATCH = {
    "get_object_center": lambda snap, a: snap.get_object_center(a),
    "get_object_size": lambda snap, a: snap.get_object_size(a),
    "get_object_category": lambda snap, a: snap.get_object_category(a),
    "gripper_holding": lambda snap: snap.gripper_holding(),
    "table_height": lambda snap: snap.table_height(),
    "has_water": lambda snap, a: snap.has_water(a),
    "inside_container": lambda snap, a: snap.inside_container(a),
}


class Evaluator:
    def __init__(self, utilities: dict[str, Definition] | None = None):
        self.utilities = dict(utilities or {})

    def evaluate_body(
        self, body: Node, snapshot: PerceptionSnapshot, env: dict[str, object]
    ):
        try:
            return self._eval(body, snapshot, env, [])
        except ExecError:
            raise
        except ZeroDivisionError:
            raise ExecError("division by zero")

    def _eval(self, node: Node, snap, env, trace):
        if isinstance(node, Num):
            return node.value
        if isinstance(node, Str):
            return node.value
        if isinstance(node, Bool):
            return node.value
        if isinstance(node, Name):
            return env[node.ident]
        if isinstance(node, Unary):
            return -self._eval(node.operand, snap, env, trace)
        if isinstance(node, Not):
            return not self._eval(node.operand, snap, env, trace)
        if isinstance(node, Binop):
            op = node.op
            if op == "and":
                return bool(
                    self._eval(node.left, snap, env, trace)
                    and self._eval(node.right, snap, env, trace)
                )
            if op == "or":
                return bool(
                    self._eval(node.left, snap, env, trace)
                    or self._eval(node.right, snap, env, trace)
                )
            lv = self._eval(node.left, snap, env, trace)
            rv = self._eval(node.right, snap, env, trace)
            if op == "+":
                return lv + rv
            if op == "-":
                return lv - rv
            if op == "*":
                return lv * rv
            if op == "/":
                if rv == 0:
                    raise ExecError(
                        "division by zero", trace + [print_expr(node)]
                    )
                return lv / rv
            if op == "==":
                return lv == rv
            if op == "!=":
                return lv != rv
            if op == "<":
                return lv < rv
            if op == "<=":
                return lv <= rv
            if op == ">":
                return lv > rv
            if op == ">=":
                return lv >= rv
            raise ExecError(f"unknown operator {op}", trace)
        if isinstance(node, Index):
            base = self._eval(node.base, snap, env, trace)
            idx = self._eval(node.index, snap, env, trace)
            i = int(idx)
            if i != idx or not 0 <= i < len(base):
                raise ExecError(
                    f"index {idx} out of range for vec2",
                    trace + [print_expr(node)],
                )
            return base[i]
        if isinstance(node, If):
            if self._eval(node.cond, snap, env, trace):
                return self._eval(node.then, snap, env, trace)
            return self._eval(node.orelse, snap, env, trace)
        if isinstance(node, Quant):
            inner = dict(env)
            results = []
            for name in snap.object_names():
                inner[node.var] = name
                results.append(bool(self._eval(node.body, snap, inner, trace)))
            return any(results) if node.kind == "any" else all(results)
        if isinstance(node, Call):
            args = [self._eval(a, snap, env, trace) for a in node.args]
            frame = f"{node.func}({', '.join(map(repr, args))})"
            if node.func in _BUILTIN_DISPATCH:
                try:
                    return _BUILTIN_DISPATCH[node.func](snap, *args)
                except ObjectNotFound as e:
                    raise ExecError(str(e), trace + [frame])
            if node.func == "min":
                return min(args)
            if node.func == "max":
                return max(args)
            if node.func == "abs":
                return abs(args[0])
            if node.func == "approx":
                a, b, tol = args
                return abs(a - b) <= tol
            if node.func in self.utilities:
                util = self.utilities[node.func]
                call_env = dict(zip(util.params, args))
                return self._eval(util.body, snap, call_env, trace + [frame])
            raise ExecError(f"unknown function {node.func!r}", trace + [frame])
        raise ExecError(f"cannot evaluate {node!r}", trace)


def evaluate_body(
    body: Node,
    snapshot: PerceptionSnapshot,
    env: dict[str, object],
    utilities: dict[str, Definition] | None = None,
):
    return Evaluator(utilities).evaluate_body(body, snapshot, env)
