"""Concrete syntax: parsing and rendering of terms and types.

Terms: identifiers match [a-z][a-zA-Z0-9_']*, abstraction is `\\x. M` (λ also
accepted, binders may be listed: `\\x y. M`), application is juxtaposition and
associates left. Types: `->` (right-assoc), `&` / `∩` (n-ary, binds tighter
than arrows), `-o` / `⊸`, and the oriented `-o_l`, `-o_r`. Output is ASCII by
default; unicode=True emits λ, ∩, ⊸.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .terms import Abs, App, Term, Var
from .typelang import (
    Arrow,
    InterArrow,
    InterType,
    LinearType,
    Lolli,
    LolliL,
    LolliR,
    OrderedType,
    SimpleType,
    TVar,
    Type,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


_TOKEN_SPEC = [
    ("IDENT", r"[a-z][a-zA-Z0-9_']*"),
    ("LAMBDA", r"\\|λ"),
    ("LOLLI_L", r"-o_l|⊸_l"),
    ("LOLLI_R", r"-o_r|⊸_r"),
    ("LOLLI", r"-o|⊸"),
    ("ARROW", r"->|→"),
    ("AMP", r"&|∩"),
    ("DOT", r"\."),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("COLON", r":"),
    ("COMMA", r","),
    ("WS", r"[ \t\r\n]+"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pat})" for name, pat in _TOKEN_SPEC))


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(src: str) -> list[_Tok]:
    toks = []
    line, col = 1, 1
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", line, col)
        kind = m.lastgroup
        text = m.group()
        if kind != "WS":
            toks.append(_Tok(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    toks.append(_Tok("EOF", "", line, col))
    return toks


class _Cursor:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Tok:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {kind}, found {tok.text or 'end of input'!r}", tok.line, tok.col)
        return self.next()


# ---- terms ----


def parse_term(src: str) -> Term:
    cur = _Cursor(_lex(src))
    t = _term(cur)
    tok = cur.peek()
    if tok.kind != "EOF":
        raise ParseError(f"unexpected {tok.text!r}", tok.line, tok.col)
    return t


def _term(cur: _Cursor) -> Term:
    if cur.peek().kind == "LAMBDA":
        cur.next()
        binders = [cur.expect("IDENT").text]
        while cur.peek().kind == "IDENT":
            binders.append(cur.next().text)
        cur.expect("DOT")
        body = _term(cur)
        for b in reversed(binders):
            body = Abs(b, body)
        return body
    return _app(cur)


def _app(cur: _Cursor) -> Term:
    t = _atom(cur)
    while cur.peek().kind in ("IDENT", "LPAREN", "LAMBDA"):
        if cur.peek().kind == "LAMBDA":
            # an abstraction in argument position extends to the right
            t = App(t, _term(cur))
            return t
        t = App(t, _atom(cur))
    return t


def _atom(cur: _Cursor) -> Term:
    tok = cur.peek()
    if tok.kind == "IDENT":
        cur.next()
        return Var(tok.text)
    if tok.kind == "LPAREN":
        cur.next()
        t = _term(cur)
        cur.expect("RPAREN")
        return t
    raise ParseError(f"expected a term, found {tok.text or 'end of input'!r}", tok.line, tok.col)


def render_term(t: Term, unicode: bool = False) -> str:
    lam = "λ" if unicode else "\\"

    def show(t: Term, pos: str) -> str:
        match t:
            case Var(v):
                return v
            case Abs():
                binders = []
                body = t
                while isinstance(body, Abs):
                    binders.append(body.binder)
                    body = body.body
                s = f"{lam}{' '.join(binders)}. {show(body, 'top')}"
                return f"({s})" if pos in ("fun", "arg") else s
            case App(fun, arg):
                s = f"{show(fun, 'fun')} {show(arg, 'arg')}"
                return f"({s})" if pos == "arg" else s
        raise TypeError(t)

    return show(t, "top")


# ---- types ----


@dataclass(frozen=True)
class TypeExpr:
    """Neutral parse of a type: a variable, an intersection of parts, or an
    arrow tagged with its spelling."""

    kind: str  # "var" | "inter" | "->" | "-o" | "-o_l" | "-o_r"
    name: str = ""
    parts: tuple["TypeExpr", ...] = ()


_ARROW_KINDS = {"ARROW": "->", "LOLLI": "-o", "LOLLI_L": "-o_l", "LOLLI_R": "-o_r"}


def parse_type_expr(src: str) -> TypeExpr:
    cur = _Cursor(_lex(src))
    te = _type(cur)
    tok = cur.peek()
    if tok.kind != "EOF":
        raise ParseError(f"unexpected {tok.text!r}", tok.line, tok.col)
    return te


def _type(cur: _Cursor) -> TypeExpr:
    left = _inter(cur)
    tok = cur.peek()
    if tok.kind in _ARROW_KINDS:
        cur.next()
        right = _type(cur)
        return TypeExpr(_ARROW_KINDS[tok.kind], parts=(left, right))
    return left


def _inter(cur: _Cursor) -> TypeExpr:
    parts = [_type_atom(cur)]
    while cur.peek().kind == "AMP":
        cur.next()
        parts.append(_type_atom(cur))
    if len(parts) == 1:
        return parts[0]
    return TypeExpr("inter", parts=tuple(parts))


def _type_atom(cur: _Cursor) -> TypeExpr:
    tok = cur.peek()
    if tok.kind == "IDENT":
        cur.next()
        return TypeExpr("var", name=tok.text)
    if tok.kind == "LPAREN":
        cur.next()
        te = _type(cur)
        cur.expect("RPAREN")
        return te
    raise ParseError(f"expected a type, found {tok.text or 'end of input'!r}", tok.line, tok.col)


def _reject(te: TypeExpr, what: str):
    raise ValueError(f"{what} cannot appear here: {render_type_expr(te)}")


def to_simple(te: TypeExpr) -> SimpleType:
    match te.kind:
        case "var":
            return TVar(te.name)
        case "->":
            return Arrow(to_simple(te.parts[0]), to_simple(te.parts[1]))
    _reject(te, "only -> arrows and variables form a simple type;")


def to_linear(te: TypeExpr) -> LinearType:
    match te.kind:
        case "var":
            return TVar(te.name)
        case "-o":
            return Lolli(to_linear(te.parts[0]), to_linear(te.parts[1]))
    _reject(te, "only -o arrows and variables form a linear type;")


def to_ordered(te: TypeExpr) -> OrderedType:
    match te.kind:
        case "var":
            return TVar(te.name)
        case "-o_l":
            return LolliL(to_ordered(te.parts[0]), to_ordered(te.parts[1]))
        case "-o_r":
            return LolliR(to_ordered(te.parts[0]), to_ordered(te.parts[1]))
    _reject(te, "only -o_l / -o_r arrows and variables form an ordered type;")


def to_inter(te: TypeExpr) -> InterType:
    match te.kind:
        case "var":
            return TVar(te.name)
        case "->":
            dom, cod = te.parts
            members = dom.parts if dom.kind == "inter" else (dom,)
            return InterArrow(tuple(to_inter(m) for m in members), to_inter(cod))
        case "inter":
            raise ValueError("an intersection may only appear in an arrow domain")
    _reject(te, "only -> arrows, & domains and variables form an intersection type;")


def parse_simple_type(src: str) -> SimpleType:
    return to_simple(parse_type_expr(src))


def parse_linear_type(src: str) -> LinearType:
    return to_linear(parse_type_expr(src))


def parse_ordered_type(src: str) -> OrderedType:
    return to_ordered(parse_type_expr(src))


def parse_inter_type(src: str) -> InterType:
    return to_inter(parse_type_expr(src))


def render_type_expr(te: TypeExpr) -> str:
    match te.kind:
        case "var":
            return te.name
        case "inter":
            return " & ".join(render_type_expr(p) for p in te.parts)
    return f"{render_type_expr(te.parts[0])} {te.kind} {render_type_expr(te.parts[1])}"


def render_type(t: Type, unicode: bool = False) -> str:
    amp = "∩" if unicode else "&"
    lolli = "⊸" if unicode else "-o"
    lolli_l = "⊸_l" if unicode else "-o_l"
    lolli_r = "⊸_r" if unicode else "-o_r"

    def atom(t: Type) -> str:
        s = show(t)
        return s if isinstance(t, TVar) else f"({s})"

    def show(t: Type) -> str:
        match t:
            case TVar(n):
                return n
            case Arrow(dom, cod):
                return f"{atom(dom)} -> {show(cod)}"
            case Lolli(dom, cod):
                return f"{atom(dom)} {lolli} {show(cod)}"
            case LolliL(dom, cod):
                return f"{atom(dom)} {lolli_l} {show(cod)}"
            case LolliR(dom, cod):
                return f"{atom(dom)} {lolli_r} {show(cod)}"
            case InterArrow(doms, cod):
                if len(doms) == 1:
                    d = doms[0]
                    left = d.name if isinstance(d, TVar) else f"({show(d)})"
                else:
                    left = f" {amp} ".join(m.name if isinstance(m, TVar) else f"({show(m)})" for m in doms)
                return f"{left} -> {show(cod)}"
        raise TypeError(t)

    return show(t)
