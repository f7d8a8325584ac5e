"""Intersection typing: checking, inference by reduce-and-replay, and the
derivation surgery both directions of beta need.

Types are strict intersections (typelang.InterArrow): an arrow whose
domain is a nonempty ordered list of member types.  Environments map
each free variable to the ordered list of types of its occurrences,
left to right.  Four rules:

    ax        x : s from {x: [s]}
    arrow_i   \\x.M : (E(x)) -> s when x is free in M; the whole list
              E(x) is discharged at once
    arrow_i'  \\x.M : (t) -> s when x is not free in M; t is any single
              type (domains of vacuous abstractions are singletons)
    arrow_e   M : (s1 ... sn) -> t plus one derivation of N per member
              gives M N : t; the environments meet pointwise

Inference normalizes first (leftmost), types the normal form, then
replays the reduction backwards one step at a time.  Each backward step
is pure derivation surgery; no search is involved, which is what keeps
the procedure a function of the trace rather than of the type language.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import count, permutations
from typing import Iterator

from .reduction import ReductionTrace, Strategy, reduce, subterm_at
from .terms import (
    Abs,
    App,
    Term,
    Var,
    alpha_eq,
    canonicalize,
    free_vars,
    FreshSupply,
)
from .typelang import (
    Flavor,
    InterArrow,
    InterType,
    TVar,
    TypeEnv,
    env_eq,
    env_meet,
    inter_eq,
    inter_list_eq,
)


@dataclass(frozen=True)
class InterDerivation:
    rule: str  # ax | arrow_i | arrow_i_prime | arrow_e
    env: "tuple[tuple[str, tuple[InterType, ...]], ...]"
    subject: Term
    ty: InterType
    premises: tuple["InterDerivation", ...] = ()

    def environment(self) -> TypeEnv:
        return {x: members for x, members in self.env}

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)


def _freeze_env(env: TypeEnv) -> tuple[tuple[str, tuple[InterType, ...]], ...]:
    return tuple((x, tuple(members)) for x, members in env.items())


def _node(
    rule: str,
    env: TypeEnv,
    subject: Term,
    ty: InterType,
    premises: tuple[InterDerivation, ...] = (),
) -> InterDerivation:
    return InterDerivation(rule, _freeze_env(env), subject, ty, premises)


def _env_without(env: TypeEnv, x: str) -> TypeEnv:
    return {k: v for k, v in env.items() if k != x}


@dataclass(frozen=True)
class InterCheckResult:
    ok: bool
    path: tuple[int, ...] = ()
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


_IOK = InterCheckResult(True)


def check_inter(d: InterDerivation, flavor: Flavor = Flavor.A) -> InterCheckResult:
    """Replay a derivation against the four rules.

    The flavor controls how intersection lists are compared: A demands
    the exact sequences, AC permutations, ACI set equality.  Derivations
    produced by this module are A-strict and therefore pass under every
    flavor.
    """
    return _icheck(d, flavor, ())


def _ifail(path: tuple[int, ...], reason: str) -> InterCheckResult:
    return InterCheckResult(False, path, reason)


def _icheck(
    d: InterDerivation, flavor: Flavor, path: tuple[int, ...]
) -> InterCheckResult:
    for i, p in enumerate(d.premises):
        sub = _icheck(p, flavor, path + (i,))
        if not sub:
            return sub

    env = d.environment()
    if d.rule == "ax":
        if d.premises:
            return _ifail(path, "ax takes no premises")
        if not isinstance(d.subject, Var):
            return _ifail(path, "ax subject must be a variable")
        want = {d.subject.name: (d.ty,)}
        if env != want:
            return _ifail(path, "ax environment must be the single assumption")
        return _IOK

    if d.rule in ("arrow_i", "arrow_i_prime"):
        if len(d.premises) != 1:
            return _ifail(path, f"{d.rule} takes one premise")
        (p,) = d.premises
        penv = p.environment()
        if not isinstance(d.subject, Abs):
            return _ifail(path, f"{d.rule} concludes an abstraction")
        x = d.subject.binder
        if d.subject.body != p.subject:
            return _ifail(path, f"{d.rule} premise subject must be the body")
        if not isinstance(d.ty, InterArrow):
            return _ifail(path, f"{d.rule} concludes an arrow")
        if not inter_eq(d.ty.cod, p.ty, flavor):
            return _ifail(path, f"{d.rule} codomain must be the premise type")
        if d.rule == "arrow_i":
            if x not in penv:
                return _ifail(path, "arrow_i needs the binder in the environment")
            if not inter_list_eq(d.ty.doms, penv[x], flavor):
                return _ifail(path, "arrow_i discharges the binder's full list")
        else:
            if x in penv:
                return _ifail(path, "arrow_i_prime needs the binder unused")
            if len(d.ty.doms) != 1:
                return _ifail(path, "arrow_i_prime domains are singletons")
        if not env_eq(env, _env_without(penv, x), flavor):
            return _ifail(path, f"{d.rule} environment must drop the binder")
        return _IOK

    if d.rule == "arrow_e":
        if len(d.premises) < 2:
            return _ifail(path, "arrow_e takes a function and argument premises")
        pf, *pas = d.premises
        if not isinstance(pf.ty, InterArrow):
            return _ifail(path, "arrow_e function premise needs an arrow type")
        if len(pas) != len(pf.ty.doms):
            return _ifail(path, "arrow_e needs one argument premise per member")
        if not _doms_matched(pf.ty.doms, [a.ty for a in pas], flavor):
            return _ifail(path, "argument types must match the domain members")
        if not isinstance(d.subject, App):
            return _ifail(path, "arrow_e concludes an application")
        if d.subject.fun != pf.subject:
            return _ifail(path, "arrow_e function premise subject mismatch")
        if any(a.subject != d.subject.arg for a in pas):
            return _ifail(path, "argument premises must all derive the argument")
        if not inter_eq(d.ty, pf.ty.cod, flavor):
            return _ifail(path, "arrow_e concludes the codomain")
        met = env_meet(pf.environment(), *[a.environment() for a in pas])
        if not env_eq(env, met, flavor):
            return _ifail(path, "arrow_e environment must be the pointwise meet")
        return _IOK

    return _ifail(path, f"unknown rule {d.rule!r}")


def _doms_matched(
    doms: tuple[InterType, ...], args: list[InterType], flavor: Flavor
) -> bool:
    """Argument premises against domain members: positional under A, any
    bijection otherwise."""
    if len(doms) != len(args):
        return False
    if all(inter_eq(a, m, flavor) for a, m in zip(args, doms)):
        return True
    if flavor is Flavor.A or len(doms) > 8:
        return False
    return any(
        all(inter_eq(args[i], m, flavor) for i, m in zip(perm, doms))
        for perm in permutations(range(len(args)))
    )


# ---------------------------------------------------------------------------
# type-variable plumbing


def subst_ty(t: InterType, s: dict[str, InterType]) -> InterType:
    match t:
        case TVar(name):
            return s.get(name, t)
        case InterArrow(doms, cod):
            return InterArrow(
                tuple(subst_ty(m, s) for m in doms), subst_ty(cod, s)
            )
    raise TypeError(t)


def ty_vars(t: InterType) -> list[str]:
    """Type variables in first-occurrence order."""
    out: list[str] = []

    def go(u: InterType) -> None:
        match u:
            case TVar(name):
                if name not in out:
                    out.append(name)
            case InterArrow(doms, cod):
                for m in doms:
                    go(m)
                go(cod)

    go(t)
    return out


def map_types(d: InterDerivation, f) -> InterDerivation:
    env = tuple(
        (x, tuple(f(m) for m in members)) for x, members in d.env
    )
    return InterDerivation(
        d.rule, env, d.subject, f(d.ty), tuple(map_types(p, f) for p in d.premises)
    )


def rename_tyvars(d: InterDerivation, s: dict[str, InterType]) -> InterDerivation:
    return map_types(d, lambda t: subst_ty(t, s))


def _deriv_ty_vars(d: InterDerivation) -> list[str]:
    """First-occurrence order: root type, then environment, then premises."""
    out: list[str] = []

    def add(t: InterType) -> None:
        for v in ty_vars(t):
            if v not in out:
                out.append(v)

    def walk(n: InterDerivation) -> None:
        add(n.ty)
        for _, members in n.env:
            for m in members:
                add(m)
        for p in n.premises:
            walk(p)

    walk(d)
    return out


def canonical_tyvars(d: InterDerivation) -> InterDerivation:
    """Rename type variables to a, b, c, ... in first-occurrence order of
    the root type, then the root environment, then the premises."""
    order: list[str] = []
    add = order.append

    def seen(v: str) -> bool:
        return v in order

    for v in ty_vars(d.ty):
        if not seen(v):
            add(v)
    for _, members in d.env:
        for m in members:
            for v in ty_vars(m):
                if not seen(v):
                    add(v)
    for v in _deriv_ty_vars(d):
        if not seen(v):
            add(v)
    names = _letter_names()
    ren = {v: TVar(next(names)) for v in order}
    return rename_tyvars(d, ren)


def _letter_names() -> Iterator[str]:
    letters = "abcdefghijklmnopqrstuvwxyz"
    yield from letters
    for i in count(1):
        for c in letters:
            yield f"{c}{i}"


class _TyFresh:
    """Generates type variable names t1, t2, ... avoiding a taken set."""

    def __init__(self, taken: set[str] | None = None) -> None:
        self.taken = set(taken or ())
        self._n = 0

    def fresh(self) -> TVar:
        while True:
            self._n += 1
            name = f"t{self._n}"
            if name not in self.taken:
                self.taken.add(name)
                return TVar(name)

    def absorb(self, d: InterDerivation) -> None:
        self.taken.update(_deriv_ty_vars(d))


# ---------------------------------------------------------------------------
# typing normal forms


class NotNormalError(ValueError):
    pass


def infer_nf(t: Term, fresh: _TyFresh | None = None) -> InterDerivation:
    """Derivation for a beta-normal form.

    Every invented intersection is a singleton: spine arguments are each
    typed once, vacuous abstractions get a fresh variable domain.  Only
    abstraction over a repeatedly used variable produces a wider list,
    collecting the occurrence types left to right.
    """
    if fresh is None:
        fresh = _TyFresh()
    d = _infer_nf(t, fresh)
    return d


def _infer_nf(t: Term, fresh: _TyFresh) -> InterDerivation:
    match t:
        case Var(x):
            a = fresh.fresh()
            return _node("ax", {x: (a,)}, t, a)
        case Abs(x, body):
            p = _infer_nf(body, fresh)
            penv = p.environment()
            if x in penv:
                ty = InterArrow(penv[x], p.ty)
                return _node("arrow_i", _env_without(penv, x), t, ty, (p,))
            dom = fresh.fresh()
            ty = InterArrow((dom,), p.ty)
            return _node("arrow_i_prime", penv, t, ty, (p,))
        case App(_, _):
            spine, args = _spine(t)
            if not isinstance(spine, Var):
                raise NotNormalError(f"redex in head position: {t}")
            arg_ds = [_infer_nf(a, fresh) for a in args]
            result = fresh.fresh()
            head_ty: InterType = result
            for a in reversed(arg_ds):
                head_ty = InterArrow((a.ty,), head_ty)
            d: InterDerivation = _node(
                "ax", {spine.name: (head_ty,)}, spine, head_ty
            )
            cur = spine
            for a in arg_ds:
                assert isinstance(d.ty, InterArrow)
                cur = App(cur, a.subject)
                d = _node(
                    "arrow_e",
                    env_meet(d.environment(), a.environment()),
                    cur,
                    d.ty.cod,
                    (d, a),
                )
            return d
    raise TypeError(t)


def _spine(t: Term) -> tuple[Term, list[Term]]:
    args: list[Term] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    return t, args[::-1]


# ---------------------------------------------------------------------------
# subject expansion: one backward beta step on a derivation


class ReplayError(RuntimeError):
    """The derivation surgery hit a shape the replay cannot rebuild."""


class _Untypable(Exception):
    """An erased argument failed to type within the fuel budget."""


def retarget(d: InterDerivation, term: Term) -> InterDerivation:
    """Rename the derivation's subject spelling onto an alpha-equal term.

    The walk is scoped, so duplicate binder names (as grafting produces)
    rename independently per occurrence.
    """
    if d.subject == term:
        return d
    if not alpha_eq(d.subject, term):
        raise ReplayError("retarget needs an alpha-equal spelling")
    return _retarget(d, term, {})


def _retarget(
    d: InterDerivation, term: Term, ren: dict[str, str]
) -> InterDerivation:
    env = tuple((ren.get(x, x), members) for x, members in d.env)
    if d.rule == "ax":
        return InterDerivation("ax", env, term, d.ty, ())
    if d.rule in ("arrow_i", "arrow_i_prime"):
        if not isinstance(term, Abs) or not isinstance(d.subject, Abs):
            raise ReplayError("retarget shapes diverged at an abstraction")
        inner = dict(ren)
        inner[d.subject.binder] = term.binder
        p = _retarget(d.premises[0], term.body, inner)
        return InterDerivation(d.rule, env, term, d.ty, (p,))
    if d.rule == "arrow_e":
        if not isinstance(term, App):
            raise ReplayError("retarget shapes diverged at an application")
        pf, *pas = d.premises
        nf = _retarget(pf, term.fun, ren)
        nas = tuple(_retarget(a, term.arg, ren) for a in pas)
        return InterDerivation("arrow_e", env, term, d.ty, (nf, *nas))
    raise ReplayError(f"unknown rule {d.rule!r}")


def subject_expand(
    d: InterDerivation,
    before: Term,
    position: tuple[str, ...],
    fuel: int = 10_000,
    fresh: _TyFresh | None = None,
) -> InterDerivation:
    """Lift a derivation over one beta step.

    d derives the term obtained from `before` by contracting the redex
    at `position`; the result derives `before` itself with the same
    type.  When the contraction erased its argument, the argument is
    typed from scratch (recursively), which may raise _Untypable.
    """
    if fresh is None:
        fresh = _TyFresh()
        fresh.absorb(d)
    return _expand_at(d, before, position, fuel, fresh)


def _expand_at(
    d: InterDerivation,
    before: Term,
    path: tuple[str, ...],
    fuel: int,
    fresh: _TyFresh,
) -> InterDerivation:
    if not path:
        return _expand_site(d, before, fuel, fresh)

    step, rest = path[0], path[1:]
    if step == "under":
        if not isinstance(before, Abs) or d.rule not in ("arrow_i", "arrow_i_prime"):
            raise ReplayError("path walks under a non-abstraction")
        if d.subject.binder != before.binder:  # type: ignore[union-attr]
            raise ReplayError("binder spelling changed above the redex")
        p = _expand_at(d.premises[0], before.body, rest, fuel, fresh)
        return _rebuild_abs(d, before.binder, p)

    if not isinstance(before, App) or d.rule != "arrow_e":
        raise ReplayError("path walks into a non-application")
    pf, *pas = d.premises
    if step == "left":
        pf = _expand_at(pf, before.fun, rest, fuel, fresh)
        new_args = list(pas)
    elif step == "right":
        new_args = [_expand_at(a, before.arg, rest, fuel, fresh) for a in pas]
    else:
        raise ReplayError(f"bad path component {step!r}")
    return _rebuild_app(pf, new_args, App(before.fun, before.arg))


def _rebuild_abs(d: InterDerivation, x: str, p: InterDerivation) -> InterDerivation:
    """Abstraction node over a rebuilt premise.

    The premise may have gained occurrences of the binder (an erased
    argument mentioned it), so arrow_i_prime can turn into arrow_i here,
    changing the type.
    """
    penv = p.environment()
    subject = Abs(x, p.subject)
    if x in penv:
        ty = InterArrow(penv[x], p.ty)
        return _node("arrow_i", _env_without(penv, x), subject, ty, (p,))
    if d.rule == "arrow_i_prime":
        assert isinstance(d.ty, InterArrow)
        ty = InterArrow(d.ty.doms, p.ty)
        return _node("arrow_i_prime", penv, subject, ty, (p,))
    raise ReplayError("binder occurrences vanished while expanding")


def _rebuild_app(
    pf: InterDerivation, pas: list[InterDerivation], subject: App
) -> InterDerivation:
    """Application node over rebuilt premises, repairing the function's
    domain when argument types shifted underneath it."""
    assert isinstance(pf.ty, InterArrow)
    arg_tys = tuple(a.ty for a in pas)
    if pf.ty.doms != arg_tys:
        pf = _respine(pf, InterArrow(arg_tys, pf.ty.cod))
    assert isinstance(pf.ty, InterArrow)
    env = env_meet(pf.environment(), *[a.environment() for a in pas])
    return _node("arrow_e", env, subject, pf.ty.cod, (pf, *pas))


def _respine(d: InterDerivation, ty: InterType) -> InterDerivation:
    """Rewrite the type of a variable-headed spine.

    Sound because an axiom derives its variable at any type; anything
    other than a spine here would be an enclosing redex, which leftmost
    order rules out.
    """
    if d.rule == "ax":
        assert isinstance(d.subject, Var)
        return _node("ax", {d.subject.name: (ty,)}, d.subject, ty)
    if d.rule == "arrow_e":
        pf, *pas = d.premises
        assert isinstance(pf.ty, InterArrow)
        pf = _respine(pf, InterArrow(pf.ty.doms, ty))
        env = env_meet(pf.environment(), *[a.environment() for a in pas])
        assert isinstance(d.subject, App)
        return _node("arrow_e", env, d.subject, ty, (pf, *pas))
    raise ReplayError("cannot rewrite the type of a non-spine function")


def _expand_site(
    d: InterDerivation, redex: Term, fuel: int, fresh: _TyFresh
) -> InterDerivation:
    if not isinstance(redex, App) or not isinstance(redex.fun, Abs):
        raise ReplayError("expansion site is not a redex")
    x, m, n = redex.fun.binder, redex.fun.body, redex.arg

    if x not in free_vars(m):
        # erasing step: the contractum is m itself
        body_d = retarget(d, m)
        arg_d = _infer(n, fuel, fresh)
        lam = _node(
            "arrow_i_prime",
            body_d.environment(),
            redex.fun,
            InterArrow((arg_d.ty,), body_d.ty),
            (body_d,),
        )
        env = env_meet(lam.environment(), arg_d.environment())
        return _node("arrow_e", env, redex, body_d.ty, (lam, arg_d))

    detached: list[InterDerivation] = []
    p = _extract(m, d, {}, x, detached)
    penv = p.environment()
    doms = tuple(a.ty for a in detached)
    if penv.get(x) != doms:
        raise ReplayError("detached occurrence types disagree with the environment")
    lam = _node(
        "arrow_i", _env_without(penv, x), redex.fun, InterArrow(doms, p.ty), (p,)
    )
    args = [retarget(a, n) for a in detached]
    env = env_meet(lam.environment(), *[a.environment() for a in args])
    return _node("arrow_e", env, redex, p.ty, (lam, *args))


def _extract(
    m: Term,
    d: InterDerivation,
    ren: dict[str, str],
    x: str,
    detached: list[InterDerivation],
) -> InterDerivation:
    """Walk the redex body m against the derivation of m[x := n].

    At each occurrence of x the derivation fragment covering the
    substituted copy of n is detached and replaced by an axiom for x at
    the same type; environments are remet on the way out.  ren tracks
    binder renamings the substitution performed on m.
    """
    match m:
        case Var(v) if v == x:
            detached.append(d)
            return _node("ax", {x: (d.ty,)}, m, d.ty)
        case Var(v):
            if d.rule != "ax" or d.subject != Var(ren.get(v, v)):
                raise ReplayError("variable occurrence does not line up")
            return _node("ax", {v: (d.ty,)}, m, d.ty)
        case Abs(b, body):
            if d.rule not in ("arrow_i", "arrow_i_prime") or not isinstance(
                d.subject, Abs
            ):
                raise ReplayError("abstraction does not line up")
            inner = dict(ren)
            if d.subject.binder != b:
                inner[b] = d.subject.binder
            p = _extract(body, d.premises[0], inner, x, detached)
            return _rebuild_abs_extract(d, b, p)
        case App(f, a):
            if d.rule != "arrow_e":
                raise ReplayError("application does not line up")
            pf, *pas = d.premises
            nf = _extract(f, pf, ren, x, detached)
            nas = [_extract(a, pa, ren, x, detached) for pa in pas]
            assert isinstance(nf.ty, InterArrow)
            if tuple(p.ty for p in nas) != nf.ty.doms:
                raise ReplayError("extraction changed an argument type")
            env = env_meet(nf.environment(), *[p.environment() for p in nas])
            return _node("arrow_e", env, App(f, a), nf.ty.cod, (nf, *nas))
    raise TypeError(m)


def _rebuild_abs_extract(
    d: InterDerivation, b: str, p: InterDerivation
) -> InterDerivation:
    penv = p.environment()
    subject = Abs(b, p.subject)
    if d.rule == "arrow_i":
        if b not in penv:
            raise ReplayError("binder lost its occurrences during extraction")
        return _node(
            "arrow_i", _env_without(penv, b), subject, InterArrow(penv[b], p.ty), (p,)
        )
    if b in penv:
        raise ReplayError("binder gained occurrences during extraction")
    assert isinstance(d.ty, InterArrow)
    return _node(
        "arrow_i_prime", penv, subject, InterArrow(d.ty.doms, p.ty), (p,)
    )


# ---------------------------------------------------------------------------
# full inference


def infer(t: Term, fuel: int = 10_000) -> InterDerivation | None:
    """Intersection derivation for t, or None when normalization does not
    land within the fuel budget (erased arguments included).

    The subject of the result is the canonicalized spelling of t; type
    variables are canonical letters.
    """
    t = canonicalize(t, FreshSupply())
    try:
        d = _infer(t, fuel, _TyFresh())
    except _Untypable:
        return None
    return canonical_tyvars(d)


def _infer(t: Term, fuel: int, fresh: _TyFresh) -> InterDerivation:
    res = reduce(t, Strategy.LEFTMOST, fuel)
    if res.status != "normal-form":
        raise _Untypable(t)
    d = _infer_nf(res.term, fresh)
    trace: ReductionTrace = res.trace
    states = [trace.start] + [s.result for s in trace.steps]
    for i in range(len(trace.steps) - 1, -1, -1):
        d = _expand_at(d, states[i], trace.steps[i].position, fuel, fresh)
        if d.subject != states[i]:
            raise ReplayError("replay lost the subject spelling")
    return d


def principal_pair(
    t: Term, fuel: int = 10_000
) -> tuple[TypeEnv, InterType] | None:
    """Environment and type of the replayed derivation, or None."""
    d = infer(t, fuel)
    if d is None:
        return None
    return d.environment(), d.ty


# ---------------------------------------------------------------------------
# subject reduction: one forward beta step on a derivation


class ReductionTypeError(RuntimeError):
    """The step does not preserve the derived type (vacuous binder with a
    non-singleton domain lost its argument)."""


def subject_reduce(
    d: InterDerivation, reduct: Term, position: tuple[str, ...]
) -> InterDerivation:
    """Push a derivation forward over one beta step.

    d derives some term with a redex at `position`; `reduct` is that
    term after contracting it (canonical spelling).  The result derives
    `reduct` at the same type: argument derivations are grafted onto the
    axiom leaves of the bound variable.
    """
    return _reduce_at(d, reduct, position)


def _reduce_at(
    d: InterDerivation, reduct: Term, path: tuple[str, ...]
) -> InterDerivation:
    if not path:
        return _reduce_site(d, reduct)
    step, rest = path[0], path[1:]
    if step == "under":
        if d.rule not in ("arrow_i", "arrow_i_prime") or not isinstance(reduct, Abs):
            raise ReplayError("path walks under a non-abstraction")
        p = _reduce_at(d.premises[0], reduct.body, rest)
        return _reduce_rebuild_abs(d, reduct.binder, p)
    if d.rule != "arrow_e" or not isinstance(reduct, App):
        raise ReplayError("path walks into a non-application")
    pf, *pas = d.premises
    if step == "left":
        pf = _reduce_at(pf, reduct.fun, rest)
    elif step == "right":
        pas = [_reduce_at(a, reduct.arg, rest) for a in pas]
    else:
        raise ReplayError(f"bad path component {step!r}")
    return _rebuild_app(pf, pas, reduct)


def _reduce_rebuild_abs(
    d: InterDerivation, x: str, p: InterDerivation
) -> InterDerivation:
    """Abstraction node over a reduced premise: binder occurrences can
    only disappear here (the step erased a subterm mentioning it)."""
    penv = p.environment()
    subject = Abs(x, p.subject)
    if x in penv:
        return _node(
            "arrow_i", _env_without(penv, x), subject, InterArrow(penv[x], p.ty), (p,)
        )
    if d.rule == "arrow_i":
        assert isinstance(d.ty, InterArrow)
        if len(d.ty.doms) != 1:
            raise ReductionTypeError(
                "binder lost all occurrences but its domain is not a singleton"
            )
        return _node(
            "arrow_i_prime", penv, subject, InterArrow(d.ty.doms, p.ty), (p,)
        )
    assert isinstance(d.ty, InterArrow)
    return _node("arrow_i_prime", penv, subject, InterArrow(d.ty.doms, p.ty), (p,))


def _reduce_site(d: InterDerivation, contractum: Term) -> InterDerivation:
    if d.rule != "arrow_e":
        raise ReplayError("reduction site is not an application")
    lam, *args = d.premises
    if lam.rule == "arrow_i_prime":
        body_d = lam.premises[0]
        return retarget(body_d, contractum)
    if lam.rule != "arrow_i":
        raise ReplayError("reduction site function is not an abstraction")
    assert isinstance(lam.subject, Abs)
    x = lam.subject.binder
    body_d = lam.premises[0]
    queue = list(args)
    grafted = _graft(body_d, x, queue)
    if queue:
        raise ReplayError("more argument derivations than occurrences")
    return retarget(grafted, contractum)


def _graft(
    d: InterDerivation, x: str, queue: list[InterDerivation]
) -> InterDerivation:
    """Replace each axiom leaf for x (left to right) with the next
    argument derivation, remeeting environments on the way out."""
    if d.rule == "ax":
        assert isinstance(d.subject, Var)
        if d.subject.name != x:
            return d
        if not queue:
            raise ReplayError("fewer argument derivations than occurrences")
        a = queue.pop(0)
        if a.ty != d.ty:
            raise ReplayError("argument type does not match the occurrence")
        return a
    if d.rule in ("arrow_i", "arrow_i_prime"):
        assert isinstance(d.subject, Abs)
        p = _graft(d.premises[0], x, queue)
        penv = p.environment()
        b = d.subject.binder
        subject = Abs(b, p.subject)
        assert isinstance(d.ty, InterArrow)
        if d.rule == "arrow_i":
            if penv.get(b) != d.ty.doms:
                raise ReplayError("grafting changed the discharged list")
            return _node("arrow_i", _env_without(penv, b), subject, d.ty, (p,))
        return _node("arrow_i_prime", penv, subject, d.ty, (p,))
    if d.rule == "arrow_e":
        pf, *pas = d.premises
        nf = _graft(pf, x, queue)
        nas = [_graft(a, x, queue) for a in pas]
        env = env_meet(nf.environment(), *[a.environment() for a in nas])
        assert isinstance(nf.ty, InterArrow)
        return _node(
            "arrow_e", env, App(nf.subject, nas[0].subject), nf.ty.cod, (nf, *nas)
        )
    raise ReplayError(f"unknown rule {d.rule!r}")


# ---------------------------------------------------------------------------
# realizing a requested type


def match_requested(
    d: InterDerivation, requested: InterType, flavor: Flavor
) -> InterDerivation | None:
    """Instantiate a derivation so its type becomes `requested`.

    One-way matching: type variables of the derivation are solved
    against the requested type, whose own variables stay rigid.  Member
    lists are matched positionally under A, bijectively under AC, and by
    covering both ways under ACI.  Returns the substituted derivation,
    or None when no consistent assignment exists.
    """
    # keep the derivation's variables apart from the requested type's
    pre = {v: TVar(f"_m{i}") for i, v in enumerate(_deriv_ty_vars(d))}
    d = rename_tyvars(d, pre)
    for s in _match_ty(d.ty, requested, {}, flavor):
        out = rename_tyvars(d, s)
        leftovers = [v for v in _deriv_ty_vars(out) if v.startswith("_m")]
        if leftovers:
            taken = set(_deriv_ty_vars(out)) | set(ty_vars(requested))
            names = (n for n in _letter_names() if n not in taken)
            out = rename_tyvars(out, {v: TVar(next(names)) for v in leftovers})
        if check_inter(out, flavor):
            return out
    return None


def _match_ty(
    pat: InterType, tgt: InterType, s: dict[str, InterType], flavor: Flavor
) -> Iterator[dict[str, InterType]]:
    pat = subst_ty(pat, s)
    match pat, tgt:
        case TVar(name), _:
            # only the derivation's own (prefixed) variables are flexible
            if name.startswith("_m"):
                yield {**s, name: tgt}
            elif pat == tgt:
                yield s
        case InterArrow(pdoms, pcod), InterArrow(tdoms, tcod):
            for s2 in _match_members(list(pdoms), list(tdoms), s, flavor):
                yield from _match_ty(pcod, tcod, s2, flavor)
        case _:
            return


def _match_members(
    pats: list[InterType], tgts: list[InterType], s: dict[str, InterType], flavor: Flavor
) -> Iterator[dict[str, InterType]]:
    if flavor is Flavor.A:
        if len(pats) != len(tgts):
            return
        yield from _match_seq(list(zip(pats, tgts)), s, flavor)
        return
    if flavor is Flavor.AC:
        if len(pats) != len(tgts):
            return
        for perm in permutations(range(len(tgts))):
            yield from _match_seq(
                [(p, tgts[i]) for p, i in zip(pats, perm)], s, flavor
            )
        return
    # ACI: every pattern member covers some target member and every
    # target member is covered at least once
    for assign in _aci_assignments(len(pats), len(tgts)):
        yield from _match_seq(
            [(p, tgts[i]) for p, i in zip(pats, assign)], s, flavor
        )


def _match_seq(
    pairs: list[tuple[InterType, InterType]],
    s: dict[str, InterType],
    flavor: Flavor,
) -> Iterator[dict[str, InterType]]:
    if not pairs:
        yield s
        return
    (p, t), rest = pairs[0], pairs[1:]
    for s2 in _match_ty(p, t, s, flavor):
        yield from _match_seq(rest, s2, flavor)


def _aci_assignments(n_pats: int, n_tgts: int) -> Iterator[tuple[int, ...]]:
    """Surjective maps from pattern positions onto target positions."""
    from itertools import product

    for assign in product(range(n_tgts), repeat=n_pats):
        if set(assign) == set(range(n_tgts)):
            yield assign
