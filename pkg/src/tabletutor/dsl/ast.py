"""AST node types and the canonical printer for predicate programs."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass(frozen=True)
class Span:
    line: int = 0
    col: int = 0

    def __repr__(self):
        return f"{self.line}:{self.col}"


class Node:
    pass


@dataclass(frozen=True, eq=False)
class _Expr(Node):
    span: Span = field(default=Span(), compare=False, repr=False, kw_only=True)

    # Structural equality ignoring spans.
    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        for name in self.__dataclass_fields__:
            if name == "span":
                continue
            if getattr(self, name) != getattr(other, name):
                return False
        return True

    def __hash__(self):
        vals = tuple(
            getattr(self, name)
            for name in self.__dataclass_fields__
            if name != "span"
        )
        return hash((type(self).__name__, vals))


@dataclass(frozen=True, eq=False)
class Num(_Expr):
    value: float = 0.0


@dataclass(frozen=True, eq=False)
class Str(_Expr):
    value: str = ""


@dataclass(frozen=True, eq=False)
class Bool(_Expr):
    value: bool = False


@dataclass(frozen=True, eq=False)
class Name(_Expr):
    ident: str = ""


@dataclass(frozen=True, eq=False)
class Call(_Expr):
    func: str = ""
    args: tuple = ()


@dataclass(frozen=True, eq=False)
class Index(_Expr):
    base: Node = None
    index: Node = None


@dataclass(frozen=True, eq=False)
class Unary(_Expr):
    op: str = "-"
    operand: Node = None


@dataclass(frozen=True, eq=False)
class Binop(_Expr):
    op: str = "+"
    left: Node = None
    right: Node = None


@dataclass(frozen=True, eq=False)
class Not(_Expr):
    operand: Node = None


@dataclass(frozen=True, eq=False)
class If(_Expr):
    cond: Node = None
    then: Node = None
    orelse: Node = None


@dataclass(frozen=True, eq=False)
class Quant(_Expr):
    kind: str = "any"  # "any" | "all"
    var: str = ""
    body: Node = None


@dataclass(frozen=True)
class Definition:
    """A `util` or `pred` block with its description comment."""

    kind: str  # "util" | "pred"
    name: str
    params: tuple[str, ...]
    body: Node
    description: str = ""


# ---------------------------------------------------------------------------
# Canonical printer. parse(print(x)) == x, and printing is a fixed point.

_PRECEDENCE = {
    "or": 1,
    "and": 2,
    "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6,
}
_NOT_PREC = 3
_UNARY_PREC = 7


def print_expr(node: Node, parent_prec: int = 0) -> str:
    if isinstance(node, Num):
        v = node.value
        text = repr(int(v)) if float(v).is_integer() else repr(v)
        return text
    if isinstance(node, Str):
        return '"' + node.value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(node, Bool):
        return "true" if node.value else "false"
    if isinstance(node, Name):
        return node.ident
    if isinstance(node, Call):
        return f"{node.func}({', '.join(print_expr(a) for a in node.args)})"
    if isinstance(node, Index):
        return f"{print_expr(node.base, _UNARY_PREC + 1)}[{print_expr(node.index)}]"
    if isinstance(node, Unary):
        text = f"-{print_expr(node.operand, _UNARY_PREC)}"
        return _paren(text, _UNARY_PREC, parent_prec)
    if isinstance(node, Not):
        text = f"not {print_expr(node.operand, _NOT_PREC)}"
        return _paren(text, _NOT_PREC, parent_prec)
    if isinstance(node, Binop):
        prec = _PRECEDENCE[node.op]
        text = (
            f"{print_expr(node.left, prec)} {node.op} "
            f"{print_expr(node.right, prec + 1)}"
        )
        return _paren(text, prec, parent_prec)
    if isinstance(node, If):
        text = (
            f"if {print_expr(node.cond)} then {print_expr(node.then)} "
            f"else {print_expr(node.orelse)}"
        )
        return _paren(text, 1, parent_prec)
    if isinstance(node, Quant):
        text = f"{node.kind} {node.var} in objects(): {print_expr(node.body)}"
        return _paren(text, 1, parent_prec)
    raise TypeError(f"cannot print {node!r}")


def _paren(text: str, prec: int, parent_prec: int) -> str:
    return f"({text})" if prec < parent_prec else text


def print_definition(d: Definition) -> str:
    lines = []
    if d.description:
        lines.append(f"# desc: {d.description}")
    lines.append(f"{d.kind} {d.name}({', '.join(d.params)}) {{")
    lines.append(f"  {print_expr(d.body)}")
    lines.append("}")
    return "\n".join(lines)


def print_program(defs: list[Definition]) -> str:
    return "\n\n".join(print_definition(d) for d in defs) + "\n"
