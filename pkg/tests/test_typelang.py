import itertools

from hypothesis import given
from hypothesis import strategies as st

import pytest

from lambda_expand.terms import FreshSupply
from lambda_expand.typelang import (
    Arrow,
    Basis,
    CollisionError,
    Flavor,
    InterArrow,
    ListExpCtx,
    Lolli,
    LolliR,
    SetExpCtx,
    Target,
    TVar,
    ctx_append,
    ctx_leq,
    ctx_to_basis,
    ctx_union,
    env_eq,
    env_meet,
    env_to_set_ctx,
    inter_eq,
    inter_list_eq,
    normalize,
    set_ctx_to_env,
    translate,
)
from lambda_expand.syntax import parse_inter_type, parse_ordered_type

A, B, C = TVar("a"), TVar("b"), TVar("c")


def it(src):
    return parse_inter_type(src)


def test_inter_arrow_requires_members():
    with pytest.raises(ValueError):
        InterArrow((), A)


def test_inter_eq_flavors():
    x = it("a & (a -> b) -> b")
    y = it("(a -> b) & a -> b")
    assert inter_eq(x, y, Flavor.ACI)
    assert inter_eq(x, y, Flavor.AC)  # multisets agree
    assert not inter_eq(x, y, Flavor.A)  # sequences differ
    dup = it("a & a -> b")
    single = it("a -> b")
    assert inter_eq(dup, single, Flavor.ACI)
    assert not inter_eq(dup, single, Flavor.AC)
    assert not inter_eq(dup, single, Flavor.A)


def test_flavor_refinement_chain():
    pool = [
        it("a -> a"),
        it("a & b -> a"),
        it("b & a -> a"),
        it("a & a & b -> a"),
        it("(a & b -> a) -> c"),
        it("(b & a -> a) -> c"),
        A,
        B,
    ]
    for x, y in itertools.product(pool, repeat=2):
        if inter_eq(x, y, Flavor.A):
            assert inter_eq(x, y, Flavor.AC)
        if inter_eq(x, y, Flavor.AC):
            assert inter_eq(x, y, Flavor.ACI)


def test_normalize_is_canonical_per_flavor():
    x = it("b & a & b -> c")
    assert normalize(x, Flavor.A) == x
    assert normalize(x, Flavor.AC) == it("a & b & b -> c")
    assert normalize(x, Flavor.ACI) == it("a & b -> c")


def test_env_meet():
    g1 = {"x": (A,), "y": (it("a -> b"),)}
    g2 = {"x": (B,), "z": (C,)}
    assert env_meet(g1, g2) == {
        "x": (A, B),
        "y": (it("a -> b"),),
        "z": (C,),
    }
    assert env_meet({}, g1) == g1
    assert env_meet(g1) == g1


def test_env_eq_flavored():
    g1 = {"x": (A, it("a -> b"))}
    g2 = {"x": (it("a -> b"), A)}
    assert env_eq(g1, g2, Flavor.AC)
    assert not env_eq(g1, g2, Flavor.A)
    assert not env_eq(g1, {"y": (A,)}, Flavor.ACI)


def test_translate_examples():
    # each domain member becomes its own arrow, right-nested
    src = it("(a -> b) & a -> b")
    assert translate(src, Target.SIMPLE) == Arrow(Arrow(A, B), Arrow(A, B))
    assert translate(src, Target.LINEAR) == Lolli(Lolli(A, B), Lolli(A, B))
    assert translate(src, Target.ORDERED) == LolliR(LolliR(A, B), LolliR(A, B))
    assert translate(A, Target.SIMPLE) == A
    nested = it("(a & b -> a) -> c")
    assert translate(nested, Target.SIMPLE) == Arrow(Arrow(A, Arrow(B, A)), C)


def brute_translate(t, arrow):
    # independent oracle: textual fold over an explicit member stack
    if isinstance(t, TVar):
        return t
    stack = list(t.doms)
    out = brute_translate(t.cod, arrow)
    while stack:
        out = arrow(brute_translate(stack.pop(), arrow), out)
    return out


tvars = st.sampled_from(["a", "b", "c"]).map(TVar)
inter_types = st.recursive(
    tvars,
    lambda sub: st.tuples(st.lists(sub, min_size=1, max_size=3), sub).map(
        lambda p: InterArrow(tuple(p[0]), p[1])
    ),
    max_leaves=7,
)


@given(inter_types)
def test_translate_matches_oracle(ty):
    assert translate(ty, Target.SIMPLE) == brute_translate(ty, Arrow)
    assert translate(ty, Target.LINEAR) == brute_translate(ty, Lolli)
    assert translate(ty, Target.ORDERED) == brute_translate(ty, LolliR)


@given(inter_types, inter_types)
def test_inter_eq_refinement(x, y):
    if inter_eq(x, y, Flavor.A):
        assert inter_eq(x, y, Flavor.AC)
    if inter_eq(x, y, Flavor.AC):
        assert inter_eq(x, y, Flavor.ACI)


def test_basis_rejects_duplicates():
    with pytest.raises(ValueError):
        Basis((("x", A), ("x", B)))


# ---- set contexts ----


def set_ctx(groups):
    return SetExpCtx({x: dict(g) for x, g in groups.items()})


def test_ctx_union():
    a = set_ctx({"x": {"x1": A}})
    b = set_ctx({"x": {"x2": B}, "y": {"y1": C}})
    u = ctx_union(a, b)
    assert u.groups == {"x": {"x1": A, "x2": B}, "y": {"y1": C}}
    with pytest.raises(CollisionError):
        ctx_union(set_ctx({"x": {"x1": A}}), set_ctx({"x": {"x1": A}}))
    with pytest.raises(CollisionError):
        ctx_union(set_ctx({"x": {"x1": A}}), set_ctx({"y": {"x1": A}}))


def test_ctx_leq():
    small = set_ctx({"x": {"x1": A}})
    big = set_ctx({"x": {"x1": A, "x2": B}, "y": {"y1": C}})
    assert ctx_leq(small, big)
    assert not ctx_leq(big, small)
    assert ctx_leq(small, small)
    assert not ctx_leq(set_ctx({"x": {"x1": B}}), big)  # type must agree


def test_env_ctx_round_trip():
    env = {"x": (A, it("a -> b")), "z": (C,)}
    ctx = env_to_set_ctx(env, FreshSupply())
    assert set_ctx_to_env(ctx) == env
    assert list(ctx.groups["x"]) == ["x1", "x2"]


def test_ctx_to_basis_set_flavor_translates():
    ctx = set_ctx({"x": {"x1": it("a & b -> c")}})
    basis = ctx_to_basis(ctx, Target.SIMPLE)
    assert basis.entries == (("x1", Arrow(A, Arrow(B, C))),)


# ---- list contexts ----


def ot(src):
    return parse_ordered_type(src)


def list_ctx(groups):
    return ListExpCtx([(x, list(g)) for x, g in groups])


def test_ctx_append_new_owner():
    a = list_ctx([("x", [("x1", ot("a"))])])
    b = list_ctx([("y", [("y1", ot("b"))])])
    assert ctx_append(a, b).groups == [
        ("x", [("x1", ot("a"))]),
        ("y", [("y1", ot("b"))]),
    ]


def test_ctx_append_splices_shared_owner():
    # derived by hand from the join clauses: the incoming group lands
    # immediately after the owner's existing bindings, not at the end
    a = list_ctx([("x", [("x1", ot("a"))]), ("z", [("z1", ot("b"))])])
    b = list_ctx([("x", [("x2", ot("c"))])])
    assert ctx_append(a, b).groups == [
        ("x", [("x1", ot("a")), ("x2", ot("c"))]),
        ("z", [("z1", ot("b"))]),
    ]


def test_ctx_append_empty_identity():
    a = list_ctx([("x", [("x1", ot("a"))])])
    assert ctx_append(a, ListExpCtx()).groups == a.groups
    assert ctx_append(ListExpCtx(), a).groups == a.groups


def test_ctx_append_collision():
    a = list_ctx([("x", [("x1", ot("a"))])])
    b = list_ctx([("x", [("x1", ot("a"))])])
    with pytest.raises(CollisionError):
        ctx_append(a, b)


def oracle_append(a, b):
    """Literal transcription of the three join clauses, recursing on the
    right operand."""
    if not b.groups:
        return a.copy()
    (x, s2), rest = b.groups[0], ListExpCtx(b.groups[1:])
    owners = a.owners()
    if x in owners:
        merged = ListExpCtx(
            [(ox, og + list(s2) if ox == x else list(og)) for ox, og in a.groups]
        )
        return oracle_append(merged, rest)
    return oracle_append(ListExpCtx(a.groups + [(x, list(s2))]), rest)


def test_ctx_append_matches_oracle():
    # enumerate small list contexts over two owners and compare joins
    pool_types = [ot("a"), ot("a -o_r b")]
    fresh = itertools.count(1)

    def contexts():
        for owners in [(), ("x",), ("y",), ("x", "y"), ("y", "x")]:
            for sizes in itertools.product([1, 2], repeat=len(owners)):
                groups = []
                for owner, n in zip(owners, sizes):
                    groups.append(
                        (owner, [(f"{owner}{next(fresh)}", pool_types[i % 2]) for i in range(n)])
                    )
                yield ListExpCtx(groups)

    all_ctxs = list(contexts())
    checked = 0
    for a, b in itertools.product(all_ctxs, repeat=2):
        if set(a.binding_vars()) & set(b.binding_vars()):
            continue
        got = ctx_append(a, b)
        want = oracle_append(a, b)
        assert got.groups == want.groups, (a.groups, b.groups)
        checked += 1
    assert checked > 50


def test_ctx_to_basis_list_flavor_keeps_order():
    ctx = list_ctx([("z", [("z2", ot("a -o_r b")), ("z1", ot("a"))])])
    basis = ctx_to_basis(ctx, Target.ORDERED)
    assert basis.entries == (("z2", ot("a -o_r b")), ("z1", ot("a")))
