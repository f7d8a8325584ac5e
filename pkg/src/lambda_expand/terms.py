"""Untyped lambda terms: construction, occurrence counting, substitution.

Terms are plain trees of Var/Abs/App. Operations that produce terms keep the
convention that no name is bound twice and no name occurs both free and bound;
`canonicalize` establishes it, renaming binders only where needed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Abs:
    binder: str
    body: "Term"


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


Term = Var | Abs | App


class DuplicateBinderError(ValueError):
    """A simultaneous substitution listed the same identifier twice."""


def size(t: Term) -> int:
    """Number of constructors in t."""
    match t:
        case Var():
            return 1
        case Abs(_, body):
            return 1 + size(body)
        case App(fun, arg):
            return 1 + size(fun) + size(arg)
    raise TypeError(t)


def free_vars(t: Term) -> list[str]:
    """Free variables in first-occurrence order, no duplicates."""
    out: list[str] = []
    seen: set[str] = set()

    def go(t: Term, bound: frozenset[str]) -> None:
        match t:
            case Var(v):
                if v not in bound and v not in seen:
                    seen.add(v)
                    out.append(v)
            case Abs(b, body):
                go(body, bound | {b})
            case App(fun, arg):
                go(fun, bound)
                go(arg, bound)

    go(t, frozenset())
    return out


def count_free_occurrences(t: Term, x: str) -> int:
    match t:
        case Var(v):
            return 1 if v == x else 0
        case Abs(b, body):
            return 0 if b == x else count_free_occurrences(body, x)
        case App(fun, arg):
            return count_free_occurrences(fun, x) + count_free_occurrences(arg, x)
    raise TypeError(t)


def all_names(t: Term) -> set[str]:
    """Every identifier occurring in t, free or bound."""
    match t:
        case Var(v):
            return {v}
        case Abs(b, body):
            return {b} | all_names(body)
        case App(fun, arg):
            return all_names(fun) | all_names(arg)
    raise TypeError(t)


@dataclass(frozen=True)
class TermClass:
    is_lambda_i: bool
    is_affine: bool
    is_linear: bool


def classify(t: Term) -> TermClass:
    """Occurrence discipline of t.

    lambda-I: every binder occurs free in its body at least once.
    affine: every binder occurs at most once, every free variable exactly once.
    linear: every binder occurs exactly once, every free variable exactly once.
    """
    at_least = True
    at_most = True

    def binders(t: Term) -> None:
        nonlocal at_least, at_most
        match t:
            case Abs(b, body):
                n = count_free_occurrences(body, b)
                if n < 1:
                    at_least = False
                if n > 1:
                    at_most = False
                binders(body)
            case App(fun, arg):
                binders(fun)
                binders(arg)

    binders(t)
    frees_once = all(count_free_occurrences(t, v) == 1 for v in free_vars(t))
    return TermClass(
        is_lambda_i=at_least,
        is_affine=at_most and frees_once,
        is_linear=at_least and at_most and frees_once,
    )


_TRAILING_DIGITS = re.compile(r"[0-9]+$")


class FreshSupply:
    """Draws identifiers that avoid every reserved name.

    fresh("x") yields x1, x2, ...; a base that already carries a trailing
    index restarts from its stem, so fresh("x1") also continues the x row.
    """

    def __init__(self, reserved: set[str] | None = None):
        self._used: set[str] = set(reserved) if reserved else set()
        self._next: dict[str, int] = {}

    def reserve(self, names) -> None:
        self._used.update(names)

    def fresh(self, base: str) -> str:
        stem = _TRAILING_DIGITS.sub("", base) or base
        k = self._next.get(stem, 1)
        while f"{stem}{k}" in self._used:
            k += 1
        name = f"{stem}{k}"
        self._next[stem] = k + 1
        self._used.add(name)
        return name


def canonicalize(t: Term, supply: FreshSupply | None = None) -> Term:
    """Rename binders so each name is bound once and never also occurs free."""
    if supply is None:
        supply = FreshSupply()
    supply.reserve(free_vars(t))
    used = set(free_vars(t))

    def go(t: Term, ren: dict[str, str]) -> Term:
        match t:
            case Var(v):
                return Var(ren.get(v, v))
            case Abs(b, body):
                if b in used:
                    b2 = supply.fresh(b)
                else:
                    b2 = b
                    supply.reserve([b])
                used.add(b2)
                return Abs(b2, go(body, {**ren, b: b2}))
            case App(fun, arg):
                return App(go(fun, ren), go(arg, ren))
        raise TypeError(t)

    return go(t, {})


def substitute(t: Term, x: str, s: Term) -> Term:
    """Capture-avoiding t[x := s]; result is canonicalized."""
    fv_s = set(free_vars(s))
    supply = FreshSupply(all_names(t) | all_names(s))

    def go(t: Term, ren: dict[str, str]) -> Term:
        match t:
            case Var(v):
                v = ren.get(v, v)
                return s if v == x else Var(v)
            case Abs(b, body):
                if b == x:
                    return Abs(b, rename_free(body, ren))
                if b in fv_s:
                    b2 = supply.fresh(b)
                    return Abs(b2, go(body, {**ren, b: b2}))
                return Abs(b, go(body, ren))
            case App(fun, arg):
                return App(go(fun, ren), go(arg, ren))
        raise TypeError(t)

    return canonicalize(go(t, {}), supply)


def rename_free(t: Term, ren: dict[str, str]) -> Term:
    if not ren:
        return t
    match t:
        case Var(v):
            return Var(ren.get(v, v))
        case Abs(b, body):
            return Abs(b, rename_free(body, {k: v for k, v in ren.items() if k != b}))
        case App(fun, arg):
            return App(rename_free(fun, ren), rename_free(arg, ren))
    raise TypeError(t)


def rename_names(t: Term, ren: dict[str, str]) -> Term:
    """Literal renaming of every variable, bound or free, binders included.

    No capture avoidance: callers must pick target names that stay clear
    of the other names in play.
    """
    if not ren:
        return t
    match t:
        case Var(v):
            return Var(ren.get(v, v))
        case Abs(b, body):
            return Abs(ren.get(b, b), rename_names(body, ren))
        case App(fun, arg):
            return App(rename_names(fun, ren), rename_names(arg, ren))
    raise TypeError(t)


def simultaneous_substitute(t: Term, bindings: list[tuple[str, Term]]) -> Term:
    """Replace each xi by si at once; the xi must be pairwise distinct."""
    names = [x for x, _ in bindings]
    if len(set(names)) != len(names):
        raise DuplicateBinderError(f"repeated identifiers: {sorted(names)}")
    table = dict(bindings)
    fv_all = set().union(*[free_vars(s) for _, s in bindings]) if bindings else set()
    supply = FreshSupply(all_names(t) | {n for _, s in bindings for n in all_names(s)})

    def go(t: Term, ren: dict[str, str]) -> Term:
        match t:
            case Var(v):
                v = ren.get(v, v)
                return table.get(v, Var(v))
            case Abs(b, body):
                if b in table:
                    return Abs(b, rename_free(body, ren))
                if b in fv_all:
                    b2 = supply.fresh(b)
                    return Abs(b2, go(body, {**ren, b: b2}))
                return Abs(b, go(body, ren))
            case App(fun, arg):
                return App(go(fun, ren), go(arg, ren))
        raise TypeError(t)

    return canonicalize(go(t, {}), supply)


def de_bruijn(t: Term):
    """Nameless key: alpha-equivalent terms get equal keys."""

    def go(t: Term, depth: dict[str, int], level: int):
        match t:
            case Var(v):
                if v in depth:
                    return ("b", level - depth[v])
                return ("f", v)
            case Abs(b, body):
                return ("l", go(body, {**depth, b: level + 1}, level + 1))
            case App(fun, arg):
                return ("a", go(fun, depth, level), go(arg, depth, level))
        raise TypeError(t)

    return go(t, {}, 0)


def alpha_eq(a: Term, b: Term) -> bool:
    return de_bruijn(a) == de_bruijn(b)


# ---- one-hole contexts ----


@dataclass(frozen=True)
class Hole:
    pass


@dataclass(frozen=True)
class AppL:
    ctx: "OneHoleContext"
    arg: Term


@dataclass(frozen=True)
class AppR:
    fun: Term
    ctx: "OneHoleContext"


@dataclass(frozen=True)
class AbsC:
    binder: str
    ctx: "OneHoleContext"


OneHoleContext = Hole | AppL | AppR | AbsC


def plug(c: OneHoleContext, t: Term) -> Term:
    """Literal hole replacement; no renaming is performed."""
    match c:
        case Hole():
            return t
        case AppL(ctx, arg):
            return App(plug(ctx, t), arg)
        case AppR(fun, ctx):
            return App(fun, plug(ctx, t))
        case AbsC(b, ctx):
            return Abs(b, plug(ctx, t))
    raise TypeError(c)
