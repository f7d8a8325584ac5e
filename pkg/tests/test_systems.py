"""Checker, builder, and decision procedures for the five basic systems."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambda_expand.syntax import (
    parse_linear_type,
    parse_ordered_type,
    parse_simple_type,
    parse_term,
)
from lambda_expand.systems import (
    CheckResult,
    Derivation,
    SizeBoundExceeded,
    System,
    build_derivation,
    check_derivation,
    check_ordered,
    decide,
    infer_curry,
    infer_ordered,
    permute_basis,
    rename_in_derivation,
    to_linear,
)
from lambda_expand.terms import Abs, App, Var, canonicalize, FreshSupply
from lambda_expand.typelang import Arrow, Basis, Lolli, LolliL, LolliR, TVar


def t(src):
    return parse_term(src)


def sty(src):
    return parse_simple_type(src)


def oty(src):
    return parse_ordered_type(src)


A = TVar("a")
B = TVar("b")


# --- ordered typability: the two-variable application probe ----------------
# (\x. x z2) z1 with z1 a function and z2 its argument.  Whether the
# judgement holds depends on both the arrow's orientation and the order
# of the basis: two of the four combinations are derivable, two are not.

PROBE = t("(\\x. x z2) z1")


def test_ordered_right_function_first_is_valid():
    basis = Basis((("z1", oty("a -o_r b")), ("z2", A)))
    assert check_ordered(basis, PROBE, B)


def test_ordered_left_function_last_is_valid():
    basis = Basis((("z2", A), ("z1", oty("a -o_l b"))))
    assert check_ordered(basis, PROBE, B)


def test_ordered_right_function_last_is_invalid():
    basis = Basis((("z2", A), ("z1", oty("a -o_r b"))))
    assert not check_ordered(basis, PROBE, B)


def test_ordered_left_function_first_is_invalid():
    basis = Basis((("z1", oty("a -o_l b")), ("z2", A)))
    assert not check_ordered(basis, PROBE, B)


def test_ordered_no_contraction():
    assert not check_ordered(Basis(()), t("\\x. x x"), oty("(a -o_r a) -o_r a"))


def test_ordered_no_weakening():
    assert not check_ordered(Basis((("z", A),)), t("\\x. z"), oty("b -o_r a"))


def test_ordered_identity_both_orientations():
    assert check_ordered(Basis(()), t("\\x. x"), oty("a -o_r a"))
    assert check_ordered(Basis(()), t("\\x. x"), oty("a -o_l a"))


def test_ordered_flip_needs_left_arrow():
    # \x y. y x applies the later binder to the earlier one; the inner
    # function position must take its argument from the left.
    flip = t("\\x y. y x")
    assert check_ordered(Basis(()), flip, oty("a -o_r (a -o_l b) -o_r b"))
    assert not check_ordered(Basis(()), flip, oty("a -o_r (a -o_r b) -o_r b"))


def test_ordered_budget():
    with pytest.raises(SizeBoundExceeded):
        check_ordered(Basis(()), t("\\x. x"), oty("a -o_r a"), budget=1)


def test_infer_ordered_golden():
    basis = Basis((("z2", oty("a -o_r b")), ("z1", A)))
    assert infer_ordered(basis, t("(\\x1. x1 z1) z2")) == B


def test_infer_ordered_exhausted():
    assert infer_ordered(Basis(()), t("\\x. x x")) is None


# --- explicit ordered derivations ------------------------------------------


def ordered_probe_derivation():
    """z2: a -o_r b, z1: a |- (\\x1. x1 z1) z2 : b, built rule by rule."""
    f = oty("a -o_r b")
    ax_x1 = Derivation(System.ORDERED, "ax", Basis((("x1", f),)), Var("x1"), f)
    ax_z1 = Derivation(System.ORDERED, "ax", Basis((("z1", A),)), Var("z1"), A)
    body = Derivation(
        System.ORDERED,
        "arrow_e_r",
        Basis((("x1", f), ("z1", A))),
        App(Var("x1"), Var("z1")),
        B,
        (ax_x1, ax_z1),
    )
    lam = Derivation(
        System.ORDERED,
        "arrow_i_l",
        Basis((("z1", A),)),
        Abs("x1", App(Var("x1"), Var("z1"))),
        LolliL(f, B),
        (body,),
    )
    ax_z2 = Derivation(System.ORDERED, "ax", Basis((("z2", f),)), Var("z2"), f)
    return Derivation(
        System.ORDERED,
        "arrow_e_l",
        Basis((("z2", f), ("z1", A))),
        App(lam.subject, Var("z2")),
        B,
        (lam, ax_z2),
    )


def test_ordered_derivation_checks():
    d = ordered_probe_derivation()
    assert check_derivation(d)
    # the search agrees with the explicit tree
    assert check_ordered(d.basis, d.subject, d.ty)


def test_ordered_derivation_wrong_basis_order_rejected():
    d = ordered_probe_derivation()
    flipped = Derivation(
        d.system, d.rule, Basis((d.basis.entries[1], d.basis.entries[0])),
        d.subject, d.ty, d.premises,
    )
    res = check_derivation(flipped)
    assert not res and res.path == ()


def test_axiom_type_must_match_entry():
    bad = Derivation(System.ORDERED, "ax", Basis((("z1", A),)), Var("z1"), B)
    res = check_derivation(bad)
    assert not res and "type" in res.reason


def test_structural_rules_rejected_outside_their_systems():
    p = Derivation(System.LINEAR, "ax", Basis((("x", A),)), Var("x"), A)
    weak = Derivation(
        System.LINEAR, "weak", Basis((("x", A), ("y", B))), Var("x"), A, (p,)
    )
    res = check_derivation(weak)
    assert not res and "not available" in res.reason

    q = Derivation(
        System.LINEAR,
        "ax",
        Basis((("x", Lolli(A, A)),)),
        Var("x"),
        Lolli(A, A),
    )
    assert check_derivation(q)


def test_contraction_rejected_in_affine_and_linear():
    for system in (System.AFFINE, System.LINEAR):
        arrow = Lolli(A, A) if system is System.LINEAR else Arrow(A, A)
        p = Derivation(
            system,
            "ax",
            Basis((("x", arrow),)),
            Var("x"),
            arrow,
        )
        # fake premise basis for a ctr node; checker must reject the rule
        # itself before inspecting shapes
        ctr = Derivation(system, "ctr", p.basis, p.subject, p.ty, (p,))
        res = check_derivation(ctr)
        assert not res and "not available" in res.reason


# --- building derivations in the set-like systems ---------------------------


def test_build_curry_s_combinator():
    term = t("\\x y z. x z (y z)")
    vt = {"x": sty("a -> b -> c"), "y": sty("a -> b"), "z": A}
    d = build_derivation(System.CURRY, term, vt)
    assert check_derivation(d)
    assert d.subject == term
    assert d.basis.entries == ()
    assert d.ty == sty("(a -> b -> c) -> (a -> b) -> a -> c")
    rules = set()

    def collect(n):
        rules.add(n.rule)
        for q in n.premises:
            collect(q)

    collect(d)
    assert "ctr" in rules  # z is shared between function and argument


def test_build_linear_identity():
    d = build_derivation(System.LINEAR, t("\\x. x"), {"x": A})
    assert check_derivation(d)
    assert d.ty == Lolli(A, A)


def test_build_linear_rejects_duplication():
    with pytest.raises(ValueError):
        build_derivation(System.LINEAR, t("\\x. x x"), {"x": Lolli(A, A)})


def test_build_relevant_rejects_vacuous_binder():
    with pytest.raises(ValueError):
        build_derivation(System.RELEVANT, t("\\x. y"), {"x": A, "y": B})


def test_build_affine_weakens_vacuous_binder():
    d = build_derivation(System.AFFINE, t("\\x. y"), {"x": A, "y": B})
    assert check_derivation(d)
    assert d.ty == Lolli(A, B)
    assert d.basis.entries == (("y", B),)


def test_build_open_term_first_occurrence_basis():
    d = build_derivation(System.CURRY, t("x z (y z)"),
                         {"x": sty("a -> b -> c"), "y": sty("a -> b"), "z": A})
    assert check_derivation(d)
    assert d.basis.vars() == ("x", "z", "y")
    assert d.ty == TVar("c")


def test_build_with_basis_order_and_weakening():
    vt = {"x": A, "w": B}
    d = build_derivation(System.CURRY, Var("x"), vt, basis_order=("w", "x"))
    assert check_derivation(d)
    assert d.basis.vars() == ("w", "x")
    with pytest.raises(ValueError):
        build_derivation(System.RELEVANT, Var("x"), vt, basis_order=("w", "x"))


def test_permute_basis_all_orders():
    from itertools import permutations

    vt = {"x": sty("b -> c"), "y": sty("a -> b"), "z": A}
    d = build_derivation(System.CURRY, t("x (y z)"), vt)
    for order in permutations(["x", "y", "z"]):
        p = permute_basis(d, tuple(order))
        assert p.basis.vars() == tuple(order)
        assert check_derivation(p)


def test_rename_in_derivation():
    d = build_derivation(System.CURRY, t("x z"), {"x": Arrow(A, B), "z": A})
    r = rename_in_derivation(d, {"z": "w"})
    assert check_derivation(r)
    assert r.subject == t("x w")
    assert r.basis.vars() == ("x", "w")


def test_build_argument_type_mismatch():
    with pytest.raises(ValueError):
        build_derivation(System.CURRY, t("x z"), {"x": Arrow(B, B), "z": A})


# --- principal simple types --------------------------------------------------


def test_infer_curry_goldens():
    assert infer_curry(t("\\x. x")) == sty("a -> a")
    assert infer_curry(t("\\x y. x")) == sty("a -> b -> a")
    assert infer_curry(t("\\x y z. x z (y z)")) == sty(
        "(a -> b -> c) -> (a -> b) -> a -> c"
    )
    assert infer_curry(t("\\f x. f (f x)")) == sty("(a -> a) -> a -> a")
    assert infer_curry(t("\\x. x x")) is None
    assert infer_curry(t("(\\x. x x) (\\x. x x)")) is None


def test_infer_curry_open_term():
    assert infer_curry(t("x z")) == TVar("a")
    assert infer_curry(t("z z")) is None


def test_to_linear():
    assert to_linear(sty("(a -> b) -> a")) == parse_linear_type("(a -o b) -o a")


def test_decide_goldens():
    church_two = t("\\f x. f (f x)")
    assert decide(System.AFFINE, church_two) is None
    assert decide(System.RELEVANT, church_two).ty == sty("(a -> a) -> a -> a")
    assert decide(System.LINEAR, t("\\x. x")).ty == parse_linear_type("a -o a")
    assert decide(System.RELEVANT, t("\\x. x x")) is None
    assert decide(System.CURRY, t("\\x. y")).ty == sty("a -> b")
    assert decide(System.AFFINE, t("\\x. y")).ty == parse_linear_type("a -o b")
    assert decide(System.RELEVANT, t("\\x. y")) is None
    assert decide(System.LINEAR, t("\\x y. y x")).ty == parse_linear_type(
        "a -o (a -o b) -o b"
    )


def test_decide_returns_checkable_witness():
    for system, subject in [
        (System.CURRY, t("\\x y z. x z (y z)")),
        (System.RELEVANT, t("\\f x. f (f x)")),
        (System.AFFINE, t("\\x. y")),
        (System.LINEAR, t("\\x y. y x")),
    ]:
        d = decide(system, subject)
        assert d is not None and d.system is system
        assert check_derivation(d)


# --- properties ---------------------------------------------------------------

idents = st.sampled_from(["x", "y", "z", "u", "v"])
terms = st.recursive(
    idents.map(Var),
    lambda sub: st.one_of(
        st.tuples(idents, sub).map(lambda p: Abs(*p)),
        st.tuples(sub, sub).map(lambda p: App(*p)),
    ),
    max_leaves=8,
)


@given(terms)
def test_infer_curry_alpha_invariant(u):
    c = canonicalize(u, FreshSupply())
    assert infer_curry(u) == infer_curry(c)


@given(terms)
@settings(max_examples=60)
def test_decide_respects_system_inclusions(u):
    linear = decide(System.LINEAR, u)
    affine = decide(System.AFFINE, u)
    relevant = decide(System.RELEVANT, u)
    curry = decide(System.CURRY, u)
    if linear is not None:
        assert affine is not None and relevant is not None
    if affine is not None or relevant is not None:
        assert curry is not None


@given(terms)
@settings(max_examples=40)
def test_decide_linear_type_mirrors_curry(u):
    linear = decide(System.LINEAR, u)
    if linear is not None:
        assert linear.ty == to_linear(infer_curry(u))
        assert check_derivation(linear)
