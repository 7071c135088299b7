"""S-expression parser for the STRIPS subset we emit.

Accepts untyped domains with conjunctive positive preconditions and
add/delete effects. Anything fancier (typing, negative preconditions,
disjunctions, quantifiers, conditional effects) raises UnsupportedFeature
so callers fail loudly instead of mis-planning.
"""
from __future__ import annotations

from ..dsl.registry import Literal
from .model import PddlAction, PddlDomain, PddlPredicate, PddlProblem, unmangle


class PddlParseError(Exception):
    pass


class UnsupportedFeature(PddlParseError):
    pass


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c in "()":
            tokens.append(c)
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            tokens.append(text[i:j])
            i = j
    return tokens


def _read(tokens: list[str], pos: int):
    if pos >= len(tokens):
        raise PddlParseError("unexpected end of input")
    tok = tokens[pos]
    if tok == "(":
        items = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            item, pos = _read(tokens, pos)
            items.append(item)
        if pos >= len(tokens):
            raise PddlParseError("unbalanced parentheses")
        return items, pos + 1
    if tok == ")":
        raise PddlParseError("unexpected ')'")
    return tok.lower(), pos + 1


def _parse_sexpr(text: str):
    tokens = _tokenize(text)
    expr, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise PddlParseError("trailing tokens after top-level form")
    return expr


_SUPPORTED_REQUIREMENTS = {":strips"}


def parse_pddl(text: str) -> PddlDomain | PddlProblem:
    expr = _parse_sexpr(text)
    if not isinstance(expr, list) or not expr or expr[0] != "define":
        raise PddlParseError("expected (define ...)")
    if len(expr) < 2 or not isinstance(expr[1], list):
        raise PddlParseError("missing (domain ...) or (problem ...) header")
    head = expr[1]
    if head[0] == "domain":
        return _parse_domain(expr)
    if head[0] == "problem":
        return _parse_problem(expr)
    raise PddlParseError(f"unknown define kind {head[0]!r}")


def _parse_domain(expr) -> PddlDomain:
    name = expr[1][1]
    requirements: tuple[str, ...] = (":strips",)
    predicates: list[PddlPredicate] = []
    actions: list[PddlAction] = []
    for form in expr[2:]:
        if not isinstance(form, list) or not form:
            raise PddlParseError("malformed domain section")
        kind = form[0]
        if kind == ":requirements":
            for req in form[1:]:
                if req not in _SUPPORTED_REQUIREMENTS:
                    raise UnsupportedFeature(f"requirement {req} not supported")
            requirements = tuple(form[1:])
        elif kind == ":predicates":
            for decl in form[1:]:
                if not isinstance(decl, list) or not decl:
                    raise PddlParseError("malformed predicate declaration")
                pname, params = decl[0], decl[1:]
                for p in params:
                    if p == "-":
                        raise UnsupportedFeature("typed parameters not supported")
                    if not isinstance(p, str) or not p.startswith("?"):
                        raise PddlParseError(f"bad predicate parameter {p!r}")
                predicates.append(PddlPredicate(pname, len(params)))
        elif kind == ":action":
            actions.append(_parse_action(form))
        elif kind == ":types":
            raise UnsupportedFeature(":types not supported")
        elif kind == ":functions":
            raise UnsupportedFeature(":functions not supported")
        elif kind == ":constants":
            raise UnsupportedFeature(":constants not supported")
        else:
            raise PddlParseError(f"unknown domain section {kind!r}")
    return PddlDomain(
        name=name,
        predicates=tuple(predicates),
        actions=tuple(actions),
        requirements=requirements,
    )


def _parse_action(form) -> PddlAction:
    name = form[1]
    sections = form[2:]
    params: tuple[str, ...] = ()
    pre: frozenset = frozenset()
    add: set = set()
    dele: set = set()
    i = 0
    while i < len(sections):
        key = sections[i]
        body = sections[i + 1] if i + 1 < len(sections) else None
        if key == ":parameters":
            plist = []
            for p in body:
                if p == "-":
                    raise UnsupportedFeature("typed parameters not supported")
                if not p.startswith("?"):
                    raise PddlParseError(f"bad parameter {p!r}")
                plist.append(p[1:])
            params = tuple(plist)
        elif key == ":precondition":
            pre = frozenset(_parse_condition(body, allow_not=False))
        elif key == ":effect":
            for lit, positive in _parse_effect(body):
                (add if positive else dele).add(lit)
        else:
            raise PddlParseError(f"unknown action section {key!r}")
        i += 2
    return PddlAction(
        name=name,
        schema=_schema_of(name),
        params=params,
        preconditions=pre,
        eff_add=frozenset(add),
        eff_del=frozenset(dele),
    )


def _schema_of(name: str) -> str:
    """Operator names are '<schema>' or '<schema>_<N>'."""
    head, sep, tail = name.rpartition("_")
    if sep and tail.isdigit():
        return head
    return name


_UNSUPPORTED_CONNECTIVES = {"or", "forall", "exists", "when", "imply", "="}


def _parse_condition(body, allow_not: bool) -> list[Literal]:
    if not isinstance(body, list) or not body:
        raise PddlParseError("malformed condition")
    if body[0] == "and":
        out = []
        for part in body[1:]:
            out.extend(_parse_condition(part, allow_not))
        return out
    if body[0] in _UNSUPPORTED_CONNECTIVES:
        raise UnsupportedFeature(f"{body[0]} conditions not supported")
    if body[0] == "not":
        raise UnsupportedFeature("negative preconditions not supported")
    return [_parse_literal(body)]


def _parse_effect(body) -> list[tuple[Literal, bool]]:
    if not isinstance(body, list) or not body:
        raise PddlParseError("malformed effect")
    if body[0] == "and":
        out = []
        for part in body[1:]:
            out.extend(_parse_effect(part))
        return out
    if body[0] in _UNSUPPORTED_CONNECTIVES:
        raise UnsupportedFeature(f"{body[0]} effects not supported")
    if body[0] == "not":
        if len(body) != 2:
            raise PddlParseError("malformed (not ...) effect")
        return [(_parse_literal(body[1]), False)]
    return [(_parse_literal(body), True)]


def _parse_literal(form) -> Literal:
    if not isinstance(form, list) or not form:
        raise PddlParseError("malformed literal")
    pred = form[0]
    args = []
    for a in form[1:]:
        if not isinstance(a, str):
            raise PddlParseError(f"bad literal argument {a!r}")
        args.append(a[1:] if a.startswith("?") else a)
    return Literal(pred, tuple(args))


def _parse_problem(expr) -> PddlProblem:
    name = expr[1][1]
    domain_name = None
    objects: tuple[str, ...] = ()
    init: set = set()
    goal: frozenset = frozenset()
    for form in expr[2:]:
        if not isinstance(form, list) or not form:
            raise PddlParseError("malformed problem section")
        kind = form[0]
        if kind == ":domain":
            domain_name = form[1]
        elif kind == ":objects":
            for o in form[1:]:
                if o == "-":
                    raise UnsupportedFeature("typed objects not supported")
            objects = tuple(unmangle(o) for o in form[1:])
        elif kind == ":init":
            for fact in form[1:]:
                lit = _parse_literal(fact)
                init.add(Literal(lit.predicate, tuple(unmangle(a) for a in lit.args)))
        elif kind == ":goal":
            lits = _parse_condition(form[1], allow_not=False)
            goal = frozenset(
                Literal(l.predicate, tuple(unmangle(a) for a in l.args))
                for l in lits
            )
        elif kind == ":metric":
            raise UnsupportedFeature(":metric not supported")
        else:
            raise PddlParseError(f"unknown problem section {kind!r}")
    if domain_name is None:
        raise PddlParseError("problem missing (:domain ...)")
    return PddlProblem(
        name=name,
        domain_name=domain_name,
        objects=objects,
        init=frozenset(init),
        goal=goal,
    )
