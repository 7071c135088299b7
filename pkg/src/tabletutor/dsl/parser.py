"""Lexer and recursive-descent parser for predicate programs."""
from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    Binop,
    Bool,
    Call,
    Definition,
    If,
    Index,
    Name,
    Node,
    Not,
    Num,
    Quant,
    Span,
    Str,
    Unary,
)

KEYWORDS = {"pred", "util", "and", "or", "not", "if", "then", "else",
            "any", "all", "in", "true", "false"}

_TWO_CHAR = ("==", "!=", "<=", ">=")
_ONE_CHAR = "+-*/()[]{},:<>"


class DslSyntaxError(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(f"{span}: {message}")
        self.span = span


@dataclass(frozen=True)
class Token:
    kind: str  # "num" | "str" | "name" | "kw" | "op" | "eof"
    text: str
    span: Span
    value: object = None


def tokenize(source: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        span = Span(line, col)
        if c == "#":
            j = source.find("\n", i)
            j = n if j < 0 else j
            text = source[i:j]
            tokens.append(Token("comment", text, span))
            col += j - i
            i = j
            continue
        if c.isdigit() or (c == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i
            while j < n and (source[j].isdigit() or source[j] == "."):
                j += 1
            text = source[i:j]
            try:
                value = float(text)
            except ValueError:
                raise DslSyntaxError(f"bad number {text!r}", span)
            tokens.append(Token("num", text, span, value))
            col += j - i
            i = j
            continue
        if c == '"':
            j = i + 1
            chars = []
            while j < n and source[j] != '"':
                if source[j] == "\\" and j + 1 < n:
                    chars.append(source[j + 1])
                    j += 2
                elif source[j] == "\n":
                    raise DslSyntaxError("unterminated string", span)
                else:
                    chars.append(source[j])
                    j += 1
            if j >= n:
                raise DslSyntaxError("unterminated string", span)
            tokens.append(Token("str", source[i : j + 1], span, "".join(chars)))
            col += j + 1 - i
            i = j + 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            kind = "kw" if text in KEYWORDS else "name"
            tokens.append(Token(kind, text, span))
            col += j - i
            i = j
            continue
        if source[i : i + 2] in _TWO_CHAR:
            tokens.append(Token("op", source[i : i + 2], span))
            i += 2
            col += 2
            continue
        if c in _ONE_CHAR:
            tokens.append(Token("op", c, span))
            i += 1
            col += 1
            continue
        raise DslSyntaxError(f"unexpected character {c!r}", span)
    tokens.append(Token("eof", "", Span(line, col)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = [t for t in tokens if t.kind != "comment"]
        self.comments = [t for t in tokens if t.kind == "comment"]
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            raise DslSyntaxError(f"expected {want!r}, found {t.text!r}", t.span)
        return self.next()

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        t = self.peek()
        if t.kind == kind and (text is None or t.text == text):
            return self.next()
        return None

    # -- program ------------------------------------------------------------

    def program(self) -> list[Definition]:
        defs = []
        while self.peek().kind != "eof":
            defs.append(self.definition())
        return defs

    def definition(self) -> Definition:
        t = self.peek()
        if not (t.kind == "kw" and t.text in ("pred", "util")):
            raise DslSyntaxError(
                f"expected 'pred' or 'util', found {t.text!r}", t.span
            )
        kind = self.next().text
        name = self.expect("name").text
        self.expect("op", "(")
        params = []
        if not self.accept("op", ")"):
            while True:
                params.append(self.expect("name").text)
                if self.accept("op", ")"):
                    break
                self.expect("op", ",")
        if len(params) != len(set(params)):
            raise DslSyntaxError(f"duplicate parameter in {name}", t.span)
        self.expect("op", "{")
        body = self.expr()
        self.expect("op", "}")
        desc = self._description_before(t.span.line)
        return Definition(kind=kind, name=name, params=tuple(params),
                          body=body, description=desc)

    def _description_before(self, line: int) -> str:
        best = None
        for c in self.comments:
            if c.span.line < line and c.text.startswith("# desc:"):
                if best is None or c.span.line > best.span.line:
                    best = c
        if best is not None and line - best.span.line <= 2:
            return best.text[len("# desc:"):].strip()
        return ""

    # -- expressions ----------------------------------------------------------

    def expr(self) -> Node:
        t = self.peek()
        if t.kind == "kw" and t.text in ("any", "all"):
            self.next()
            var = self.expect("name").text
            self.expect("kw", "in")
            fn = self.expect("name")
            if fn.text != "objects":
                raise DslSyntaxError("quantifier domain must be objects()", fn.span)
            self.expect("op", "(")
            self.expect("op", ")")
            self.expect("op", ":")
            body = self.expr()
            return Quant(t.text, var, body, span=t.span)
        if t.kind == "kw" and t.text == "if":
            self.next()
            cond = self.expr()
            self.expect("kw", "then")
            then = self.expr()
            self.expect("kw", "else")
            orelse = self.expr()
            return If(cond, then, orelse, span=t.span)
        return self.or_expr()

    def or_expr(self) -> Node:
        left = self.and_expr()
        while self.peek().kind == "kw" and self.peek().text == "or":
            span = self.next().span
            left = Binop("or", left, self.and_expr(), span=span)
        return left

    def and_expr(self) -> Node:
        left = self.not_expr()
        while self.peek().kind == "kw" and self.peek().text == "and":
            span = self.next().span
            left = Binop("and", left, self.not_expr(), span=span)
        return left

    def not_expr(self) -> Node:
        t = self.peek()
        if t.kind == "kw" and t.text == "not":
            self.next()
            return Not(self.not_expr(), span=t.span)
        return self.comparison()

    def comparison(self) -> Node:
        left = self.additive()
        t = self.peek()
        if t.kind == "op" and t.text in ("==", "!=", "<", "<=", ">", ">="):
            self.next()
            right = self.additive()
            return Binop(t.text, left, right, span=t.span)
        return left

    def additive(self) -> Node:
        left = self.multiplicative()
        while self.peek().kind == "op" and self.peek().text in ("+", "-"):
            t = self.next()
            left = Binop(t.text, left, self.multiplicative(), span=t.span)
        return left

    def multiplicative(self) -> Node:
        left = self.unary()
        while self.peek().kind == "op" and self.peek().text in ("*", "/"):
            t = self.next()
            left = Binop(t.text, left, self.unary(), span=t.span)
        return left

    def unary(self) -> Node:
        t = self.peek()
        if t.kind == "op" and t.text == "-":
            self.next()
            return Unary("-", self.unary(), span=t.span)
        return self.postfix()

    def postfix(self) -> Node:
        node = self.primary()
        while self.accept("op", "["):
            idx = self.expr()
            self.expect("op", "]")
            node = Index(node, idx, span=node.span)
        return node

    def primary(self) -> Node:
        t = self.next()
        if t.kind == "num":
            return Num(float(t.value), span=t.span)
        if t.kind == "str":
            return Str(t.value, span=t.span)
        if t.kind == "kw" and t.text in ("true", "false"):
            return Bool(t.text == "true", span=t.span)
        if t.kind == "kw" and t.text in ("any", "all", "if"):
            # allow parenthesis-free nesting after '(' only; rewind and parse
            self.pos -= 1
            return self.expr()
        if t.kind == "name":
            if self.accept("op", "("):
                args = []
                if not self.accept("op", ")"):
                    while True:
                        args.append(self.expr())
                        if self.accept("op", ")"):
                            break
                        self.expect("op", ",")
                return Call(t.text, tuple(args), span=t.span)
            return Name(t.text, span=t.span)
        if t.kind == "op" and t.text == "(":
            inner = self.expr()
            self.expect("op", ")")
            return inner
        raise DslSyntaxError(f"unexpected token {t.text!r}", t.span)


def parse_program(source: str) -> list[Definition]:
    """Parse a .pscript source into utility/predicate definitions."""
    parser = _Parser(tokenize(source))
    return parser.program()


def parse_expr(source: str) -> Node:
    parser = _Parser(tokenize(source))
    node = parser.expr()
    t = parser.peek()
    if t.kind != "eof":
        raise DslSyntaxError(f"trailing input {t.text!r}", t.span)
    return node
