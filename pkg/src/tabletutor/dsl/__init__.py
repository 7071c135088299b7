from .ast import (
    Node,
    Num,
    Str,
    Bool,
    Name,
    Call,
    Index,
    Unary,
    Binop,
    Not,
    If,
    Quant,
    Definition,
    print_expr,
    print_definition,
    print_program,
)
from .parser import parse_program, parse_expr, DslSyntaxError
from .checker import check_program, check_definition, DslTypeError, Signature
from .interp import evaluate_body, ExecError
from .registry import (
    Predicate,
    UtilityFunction,
    Literal,
    SymbolicState,
    PredicateRegistry,
    parse_state,
    extensionally_equal,
    negation_name,
    is_negation,
)

__all__ = [
    "Node", "Num", "Str", "Bool", "Name", "Call", "Index", "Unary", "Binop",
    "Not", "If", "Quant", "Definition",
    "print_expr", "print_definition", "print_program",
    "parse_program", "parse_expr", "DslSyntaxError",
    "check_program", "check_definition", "DslTypeError", "Signature",
    "evaluate_body", "ExecError",
    "Predicate", "UtilityFunction", "Literal", "SymbolicState",
    "PredicateRegistry", "parse_state", "extensionally_equal",
    "negation_name", "is_negation",
]
