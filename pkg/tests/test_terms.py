from hypothesis import given
from hypothesis import strategies as st

from lambda_expand.terms import (
    Abs,
    AbsC,
    App,
    AppL,
    DuplicateBinderError,
    FreshSupply,
    Hole,
    Var,
    alpha_eq,
    all_names,
    canonicalize,
    classify,
    count_free_occurrences,
    de_bruijn,
    free_vars,
    plug,
    simultaneous_substitute,
    size,
    substitute,
)
from lambda_expand.syntax import parse_term, render_term

import pytest


def t(src):
    return parse_term(src)


# ---- hypothesis strategies ----

idents = st.sampled_from(["x", "y", "z", "u", "v"])
terms = st.recursive(
    idents.map(Var),
    lambda sub: st.one_of(
        st.tuples(idents, sub).map(lambda p: Abs(*p)),
        st.tuples(sub, sub).map(lambda p: App(*p)),
    ),
    max_leaves=8,
)


def test_size():
    assert size(t("x")) == 1
    assert size(t("\\x. x")) == 2
    assert size(t("(\\x. x x) (\\x. x)")) == 7


def test_free_vars_first_occurrence_order():
    assert free_vars(t("(\\x. x z2) z1")) == ["z2", "z1"]
    assert free_vars(t("\\x. x")) == []
    assert free_vars(t("x y x")) == ["x", "y"]


def test_count_free_occurrences():
    assert count_free_occurrences(t("\\x. x x"), "x") == 0
    assert count_free_occurrences(t("x (\\x. x) x"), "x") == 2
    assert count_free_occurrences(t("\\y. x y"), "x") == 1


def test_classify_examples():
    cases = [
        ("\\x y z. x z (y z)", (True, False, False)),
        ("\\x. y", (False, True, False)),
        ("\\x. x", (True, True, True)),
        ("\\x. x x", (True, False, False)),
        ("x y", (True, True, True)),
        ("x x", (True, False, False)),
        ("\\x y. x", (False, True, False)),
    ]
    for src, (li, aff, lin) in cases:
        c = classify(t(src))
        assert (c.is_lambda_i, c.is_affine, c.is_linear) == (li, aff, lin), src


def test_fresh_supply_continues_indexed_bases():
    s = FreshSupply({"x1", "x2"})
    assert s.fresh("x") == "x3"
    assert s.fresh("x1") == "x4"
    assert s.fresh("y") == "y1"


def test_canonicalize_renames_only_where_needed():
    out = canonicalize(t("\\x. x (\\x. x)"))
    assert render_term(out) == "\\x. x (\\x1. x1)"
    # a binder clashing with a free variable is refreshed
    out = canonicalize(t("x (\\x. x)"))
    assert render_term(out) == "x (\\x1. x1)"
    # already canonical terms are untouched
    assert canonicalize(t("\\x y. x y")) == t("\\x y. x y")


def test_substitute_basic():
    assert substitute(t("x y"), "x", t("\\z. z")) == t("(\\z. z) y")


def test_substitute_avoids_capture():
    out = substitute(t("\\y. x"), "x", t("y"))
    # the binder must move out of the way of the free y
    assert isinstance(out, Abs)
    assert out.binder != "y"
    assert out.body == Var("y")


def test_substitute_refreshes_duplicated_binders():
    out = substitute(t("x x"), "x", t("\\y. y"))
    assert alpha_eq(out, t("(\\y. y) (\\y. y)"))
    assert isinstance(out, App)
    assert out.fun.binder != out.arg.binder  # result is canonical


def test_substitute_shadowed_variable_untouched():
    assert substitute(t("\\x. x"), "x", t("y")) == t("\\x. x")


def test_simultaneous_substitute_rejects_duplicates():
    with pytest.raises(DuplicateBinderError):
        simultaneous_substitute(t("x"), [("x", t("y")), ("x", t("z"))])


def test_simultaneous_matches_sequential_oracle():
    # oracle: when no binding identifier is free in any replacement,
    # simultaneous substitution equals any sequential order
    cases = [
        ("x y", [("x", "\\u. u"), ("y", "v v")]),
        ("x (y x)", [("x", "u"), ("y", "\\w. w w")]),
        ("\\z. x y z", [("x", "z z"), ("y", "u")]),
        ("x1 x2 x1", [("x1", "\\a. a"), ("x2", "b")]),
    ]
    for src, raw in cases:
        bindings = [(x, t(s)) for x, s in raw]
        sim = simultaneous_substitute(t(src), bindings)
        seq = t(src)
        for x, s in bindings:
            seq = substitute(seq, x, s)
        assert alpha_eq(sim, seq), src
        seq_rev = t(src)
        for x, s in reversed(bindings):
            seq_rev = substitute(seq_rev, x, s)
        assert alpha_eq(sim, seq_rev), src


def test_alpha_eq():
    assert alpha_eq(t("\\x. x"), t("\\y. y"))
    assert not alpha_eq(t("\\x y. x"), t("\\x y. y"))
    assert not alpha_eq(t("x"), t("y"))  # free names matter
    assert alpha_eq(t("\\x. x z"), t("\\w. w z"))
    assert not alpha_eq(t("x y"), t("y x"))


def test_de_bruijn_key_is_alpha_invariant():
    assert de_bruijn(t("\\x. \\y. x y")) == de_bruijn(t("\\a. \\b. a b"))
    assert de_bruijn(t("\\x. x")) != de_bruijn(t("\\x. \\y. y"))


def test_plug_is_literal():
    # no renaming: plugging x under \x. captures it, by design
    assert plug(AbsC("x", Hole()), Var("x")) == t("\\x. x")
    assert plug(AppL(Hole(), Var("y")), t("\\x. x")) == t("(\\x. x) y")


@given(terms)
def test_canonicalize_preserves_alpha_class(u):
    assert alpha_eq(canonicalize(u), u)


@given(terms)
def test_canonicalize_establishes_convention(u):
    c = canonicalize(u)
    bound = []

    def collect(t):
        if isinstance(t, Abs):
            bound.append(t.binder)
            collect(t.body)
        elif isinstance(t, App):
            collect(t.fun)
            collect(t.arg)

    collect(c)
    assert len(bound) == len(set(bound))
    assert not set(bound) & set(free_vars(c))


@given(terms, idents)
def test_substitute_identity(u, x):
    u = canonicalize(u)
    assert alpha_eq(substitute(u, x, Var(x)), u)


@given(terms)
def test_classify_alpha_invariant(u):
    u = canonicalize(u)
    assert classify(u) == classify(canonicalize(Abs("w", u)).body)


@given(terms, idents, terms)
def test_substitute_drops_target(u, x, s):
    u = canonicalize(u)
    s = canonicalize(s)
    if x in free_vars(s):
        return
    out = substitute(u, x, s)
    assert x not in free_vars(out)
    assert set(free_vars(out)) <= (set(free_vars(u)) - {x}) | set(free_vars(s))
