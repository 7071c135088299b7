"""Static type checker for predicate programs.

Types: num, vec2, str, bool, obj. Parameters and quantifier variables are
object names (obj), which compare with strings but carry no arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    Binop, Bool, Call, Definition, If, Index, Name, Node, Not, Num, Quant,
    Span, Str, Unary,
)

NUM, VEC2, STR, BOOL, OBJ = "num", "vec2", "str", "bool", "obj"

MAX_QUANTIFIER_DEPTH = 2

# Perception builtins readable by every program.
BUILTINS = {
    "get_object_center": ((OBJ,), VEC2),
    "get_object_size": ((OBJ,), VEC2),
    "get_object_category": ((OBJ,), STR),
    "gripper_holding": ((), STR),
    "table_height": ((), NUM),
    "has_water": ((OBJ,), BOOL),
    "inside_container": ((OBJ,), STR),
    # numeric helpers
    "min": ((NUM, NUM), NUM),
    "max": ((NUM, NUM), NUM),
    "abs": ((NUM,), NUM),
    "approx": ((NUM, NUM, NUM), BOOL),
}


class DslTypeError(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(f"{span}: {message}")
        self.span = span


@dataclass(frozen=True)
class Signature:
    params: tuple[str, ...]  # param type names
    returns: str


def _is_stringy(t: str) -> bool:
    return t in (STR, OBJ)


class Checker:
    def __init__(self, utilities: dict[str, Signature] | None = None):
        self.utilities = dict(utilities or {})

    def check_expr(self, node: Node, env: dict[str, str], depth: int = 0) -> str:
        if isinstance(node, Num):
            return NUM
        if isinstance(node, Str):
            return STR
        if isinstance(node, Bool):
            return BOOL
        if isinstance(node, Name):
            if node.ident not in env:
                raise DslTypeError(f"unknown name {node.ident!r}", node.span)
            return env[node.ident]
        if isinstance(node, Unary):
            t = self.check_expr(node.operand, env, depth)
            if t != NUM:
                raise DslTypeError(f"unary '-' needs num, got {t}", node.span)
            return NUM
        if isinstance(node, Not):
            t = self.check_expr(node.operand, env, depth)
            if t != BOOL:
                raise DslTypeError(f"'not' needs bool, got {t}", node.span)
            return BOOL
        if isinstance(node, Binop):
            lt = self.check_expr(node.left, env, depth)
            rt = self.check_expr(node.right, env, depth)
            op = node.op
            if op in ("and", "or"):
                if lt != BOOL or rt != BOOL:
                    raise DslTypeError(f"'{op}' needs bool operands", node.span)
                return BOOL
            if op in ("+", "-", "*", "/"):
                if lt != NUM or rt != NUM:
                    raise DslTypeError(
                        f"'{op}' needs num operands, got {lt} and {rt}", node.span
                    )
                return NUM
            if op in ("<", "<=", ">", ">="):
                if lt != NUM or rt != NUM:
                    raise DslTypeError(
                        f"'{op}' compares numbers, got {lt} and {rt}", node.span
                    )
                return BOOL
            if op in ("==", "!="):
                ok = (
                    (lt == NUM and rt == NUM)
                    or (lt == BOOL and rt == BOOL)
                    or (_is_stringy(lt) and _is_stringy(rt))
                )
                if not ok:
                    raise DslTypeError(
                        f"'{op}' cannot compare {lt} with {rt}", node.span
                    )
                return BOOL
            raise DslTypeError(f"unknown operator {op!r}", node.span)
        if isinstance(node, Index):
            bt = self.check_expr(node.base, env, depth)
            it = self.check_expr(node.index, env, depth)
            if bt != VEC2:
                raise DslTypeError(f"indexing needs vec2, got {bt}", node.span)
            if it != NUM:
                raise DslTypeError(f"index must be num, got {it}", node.span)
            return NUM
        if isinstance(node, If):
            ct = self.check_expr(node.cond, env, depth)
            if ct != BOOL:
                raise DslTypeError(f"'if' condition must be bool, got {ct}", node.span)
            tt = self.check_expr(node.then, env, depth)
            et = self.check_expr(node.orelse, env, depth)
            if tt != et:
                raise DslTypeError(
                    f"'if' branches differ: {tt} vs {et}", node.span
                )
            return tt
        if isinstance(node, Quant):
            if depth + 1 > MAX_QUANTIFIER_DEPTH:
                raise DslTypeError("quantifier depth exceeds 2", node.span)
            if node.var in env:
                raise DslTypeError(
                    f"quantifier variable {node.var!r} shadows a name", node.span
                )
            inner = dict(env)
            inner[node.var] = OBJ
            bt = self.check_expr(node.body, inner, depth + 1)
            if bt != BOOL:
                raise DslTypeError(f"quantifier body must be bool, got {bt}", node.span)
            return BOOL
        if isinstance(node, Call):
            if node.func in BUILTINS:
                want, ret = BUILTINS[node.func]
            elif node.func in self.utilities:
                sig = self.utilities[node.func]
                want, ret = sig.params, sig.returns
            else:
                raise DslTypeError(f"unknown function {node.func!r}", node.span)
            if len(node.args) != len(want):
                raise DslTypeError(
                    f"{node.func} takes {len(want)} args, got {len(node.args)}",
                    node.span,
                )
            for i, (arg, wt) in enumerate(zip(node.args, want)):
                at = self.check_expr(arg, env, depth)
                if wt == OBJ:
                    if not _is_stringy(at):
                        raise DslTypeError(
                            f"{node.func} arg {i + 1} must be an object name, "
                            f"got {at}",
                            arg.span,
                        )
                elif at != wt:
                    raise DslTypeError(
                        f"{node.func} arg {i + 1} must be {wt}, got {at}", arg.span
                    )
            return ret
        raise DslTypeError(f"cannot type-check {node!r}", Span())

    def check_definition(self, d: Definition) -> Signature:
        env = {p: OBJ for p in d.params}
        ret = self.check_expr(d.body, env)
        if d.kind == "pred" and ret != BOOL:
            raise DslTypeError(
                f"predicate {d.name} body must be bool, got {ret}", Span()
            )
        return Signature(params=tuple(OBJ for _ in d.params), returns=ret)


def check_definition(
    d: Definition, utilities: dict[str, Signature] | None = None
) -> Signature:
    return Checker(utilities).check_definition(d)


def check_program(defs: list[Definition]) -> dict[str, Signature]:
    """Type-check a file in order; utilities may call earlier utilities only."""
    checker = Checker()
    sigs: dict[str, Signature] = {}
    for d in defs:
        if d.name in sigs or d.name in BUILTINS:
            raise DslTypeError(f"redefinition of {d.name!r}", Span())
        sig = checker.check_definition(d)
        sigs[d.name] = sig
        if d.kind == "util":
            checker.utilities[d.name] = sig
    return sigs
