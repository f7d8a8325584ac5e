"""Intersection typing: checker, normal-form inference, replay, surgery.

Expected types in the goldens were derived by hand, rule by rule, before
the implementation; check_inter acts as the independent oracle for
everything the replay produces.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambda_expand.intersection import (
    InterDerivation,
    check_inter,
    infer,
    infer_nf,
    match_requested,
    principal_pair,
    subject_expand,
    subject_reduce,
)
from lambda_expand.reduction import Strategy, beta_step, redex_positions, reduce
from lambda_expand.syntax import parse_term, render_type
from lambda_expand.systems import infer_curry
from lambda_expand.terms import (
    alpha_eq,
    Abs,
    App,
    FreshSupply,
    Var,
    canonicalize,
    classify,
    free_vars,
)
from lambda_expand.typelang import Flavor, InterArrow, TVar, normalize

A = TVar("a")
B = TVar("b")
C = TVar("c")


def t(src):
    return parse_term(src)


def arr(*parts):
    """arr(m1, m2, ..., cod) builds (m1 & m2 & ...) -> cod."""
    return InterArrow(tuple(parts[:-1]), parts[-1])


AA = arr(A, A)  # a -> a


def test_infer_nf_self_application():
    d = infer(t("\\x. x x"))
    assert d is not None
    # occurrence order: the function copy's type comes first
    assert d.ty == arr(arr(A, B), A, B)
    assert d.environment() == {}
    assert check_inter(d)


def test_infer_nf_spine_and_vacuous_binder():
    d = infer(t("\\x. y"))
    assert d is not None
    assert d.ty == arr(A, B)
    assert d.environment() == {"y": (B,)}

    # canonical letters: the subject's own type is named first
    d2 = infer(t("x (y z)"))
    assert d2 is not None
    assert d2.ty == A
    assert d2.environment() == {
        "x": (arr(B, A),),
        "y": (arr(C, B),),
        "z": (C,),
    }


def test_infer_nf_rejects_redex():
    with pytest.raises(Exception):
        infer_nf(t("(\\x. x) y"))


def test_infer_self_application_of_identity():
    d = infer(t("(\\x. x x) (\\y. y)"))
    assert d is not None
    assert d.subject == t("(\\x. x x) (\\y. y)")
    assert d.ty == AA
    assert d.environment() == {}
    assert check_inter(d)
    # the inner abstraction collects both occurrence types of x
    lam = d.premises[0]
    assert lam.subject == t("\\x. x x")
    assert lam.ty == arr(arr(AA, AA), AA, AA)


def test_infer_erasing_step():
    d = infer(t("\\x. (\\y. z) x x"))
    assert d is not None
    # the erased occurrence's fresh type comes first in the domain
    assert d.ty == arr(A, B, C)
    assert d.environment() == {"z": (arr(B, C),)}
    assert check_inter(d)


def test_infer_omega_gives_up():
    assert infer(t("(\\x. x x) (\\x. x x)"), fuel=200) is None


def test_infer_erased_divergent_argument_gives_up():
    assert infer(t("(\\x. y) ((\\x. x x) (\\x. x x))"), fuel=200) is None


def test_infer_nested_erasure_under_binder():
    # the erased argument mentions the enclosing binder, so the vacuous
    # abstraction above it must widen into a real discharge
    d = infer(t("\\b. (\\x. \\z. z) b"))
    assert d is not None
    assert check_inter(d)
    assert d.ty == arr(A, arr(B, B))
    assert d.environment() == {}


def test_principal_pair():
    env, ty = principal_pair(t("x x"))
    assert ty == A
    assert env == {"x": (arr(B, A), B)}


def test_check_inter_flavor_sensitivity():
    d = infer(t("\\x. x x"))
    doms = d.ty.doms
    tampered = InterDerivation(
        d.rule, d.env, d.subject, InterArrow((doms[1], doms[0]), d.ty.cod), d.premises
    )
    assert not check_inter(tampered, Flavor.A)
    assert check_inter(tampered, Flavor.AC)
    assert check_inter(tampered, Flavor.ACI)


def test_check_inter_rejects_broken_env():
    d = infer(t("\\x. x x"))
    tampered = InterDerivation(d.rule, (("w", (A,)),), d.subject, d.ty, d.premises)
    res = check_inter(tampered)
    assert not res and res.reason


def test_subject_reduce_chain_keeps_type():
    d = infer(t("(\\x. x x) (\\y. y)"))
    term = d.subject
    while True:
        poss = redex_positions(term)
        if not poss:
            break
        reduct = beta_step(term, poss[0])
        d = subject_reduce(d, reduct, poss[0])
        assert check_inter(d)
        assert d.subject == reduct
        assert d.ty == AA
        term = reduct
    assert alpha_eq(term, t("\\y. y"))


def test_subject_expand_one_step():
    before = t("(\\x. x) (\\y. y)")
    after = beta_step(before, ())
    d = infer(after)
    e = subject_expand(d, before, ())
    assert check_inter(e)
    assert e.subject == before
    assert e.ty == d.ty


def test_match_requested_merges_under_aci():
    d = infer(t("\\f x. f (f x)"))
    assert d is not None
    # two distinct occurrence types for f
    assert d.ty == arr(arr(A, B), arr(C, A), arr(C, B))
    req = arr(AA, arr(A, A))  # (a -> a) -> a -> a
    out = match_requested(d, req, Flavor.ACI)
    assert out is not None
    assert normalize(out.ty, Flavor.ACI) == normalize(req, Flavor.ACI)
    assert check_inter(out, Flavor.ACI)
    # the two members are forced equal, so width cannot match exactly
    assert match_requested(d, req, Flavor.AC) is None
    assert match_requested(d, req, Flavor.A) is None


def test_match_requested_rigid_variables():
    d = infer(t("\\x. x"))
    out = match_requested(d, arr(B, B), Flavor.A)
    assert out is not None and out.ty == arr(B, B)
    assert match_requested(d, arr(A, B), Flavor.A) is None


def test_render_of_inferred_type():
    d = infer(t("\\x. x x"))
    assert render_type(d.ty) == "(a -> b) & a -> b"


# --- properties --------------------------------------------------------------

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
@settings(max_examples=80, deadline=None)
def test_replay_output_checks_under_every_flavor(u):
    d = infer(u, fuel=300)
    if d is None:
        return
    assert d.subject == canonicalize(u, FreshSupply())
    for flavor in Flavor:
        assert check_inter(d, flavor)
    assert set(d.environment()) == set(free_vars(u))


@given(terms)
@settings(max_examples=60, deadline=None)
def test_simply_typable_terms_are_inter_typable(u):
    if infer_curry(u) is not None:
        assert infer(u, fuel=500) is not None


@given(terms)
@settings(max_examples=60, deadline=None)
def test_lambda_i_round_trip(u):
    if not classify(u).is_lambda_i:
        return
    d = infer(u, fuel=300)
    if d is None:
        return
    term = d.subject
    poss = redex_positions(term)
    if not poss:
        return
    reduct = beta_step(term, poss[0])
    r = subject_reduce(d, reduct, poss[0])
    assert check_inter(r)
    assert r.ty == d.ty
    back = subject_expand(r, term, poss[0])
    assert check_inter(back)
    assert back.ty == d.ty
    assert back.subject == term
