"""Typing judgements for the structural-rule family of simple type systems.

Five systems share one derivation shape. They differ in which structural
rules are admitted and in which arrow connective they use:

    curry     weak, ex, ctr    ->
    relevant  ex, ctr          ->
    affine    weak, ex         -o
    linear    ex               -o
    ordered   (none)           -o_l and -o_r

Bases are ordered association lists (typelang.Basis), so exchange is a
real rule here rather than a metatheorem. A derivation is an explicit
tree; `check_derivation` replays every node against the rule table for
its system.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from itertools import count
from typing import Iterator

from .terms import (
    Abs,
    App,
    FreshSupply,
    Term,
    Var,
    all_names,
    canonicalize,
    classify,
    free_vars,
    rename_free,
)
from .typelang import (
    Arrow,
    Basis,
    Lolli,
    LolliL,
    LolliR,
    OrderedType,
    SimpleType,
    TVar,
    Type,
)


class System(Enum):
    CURRY = "curry"
    RELEVANT = "relevant"
    AFFINE = "affine"
    LINEAR = "linear"
    ORDERED = "ordered"


# Structural rules each system admits.  Ordered admits none.
STRUCTURAL: dict[System, frozenset[str]] = {
    System.CURRY: frozenset({"weak", "ex", "ctr"}),
    System.RELEVANT: frozenset({"ex", "ctr"}),
    System.AFFINE: frozenset({"weak", "ex"}),
    System.LINEAR: frozenset({"ex"}),
    System.ORDERED: frozenset(),
}

ARROW_RULES = frozenset({"arrow_i", "arrow_e"})
ORDERED_RULES = frozenset({"arrow_i_l", "arrow_i_r", "arrow_e_l", "arrow_e_r"})


@dataclass(frozen=True)
class Derivation:
    """One node of a typing derivation.

    premises are ordered; for the elimination rules the function premise
    comes first and the argument premise second, regardless of how the
    rule arranges their bases in the conclusion.
    """

    system: System
    rule: str
    basis: Basis
    subject: Term
    ty: Type
    premises: tuple["Derivation", ...] = ()

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    path: tuple[int, ...] = ()
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _fail(path: tuple[int, ...], reason: str) -> CheckResult:
    return CheckResult(False, path, reason)


_OK = CheckResult(True)


def check_derivation(d: Derivation) -> CheckResult:
    """Replay one derivation tree against the rule table of d.system."""
    return _check(d, ())


def _check(d: Derivation, path: tuple[int, ...]) -> CheckResult:
    for i, p in enumerate(d.premises):
        if p.system is not d.system:
            return _fail(path + (i,), "premise belongs to a different system")
        sub = _check(p, path + (i,))
        if not sub:
            return sub

    sys = d.system
    rule = d.rule
    if rule == "ax":
        return _check_ax(d, path)
    if rule in STRUCTURAL[sys]:
        return _check_structural(d, path)
    if sys is System.ORDERED:
        if rule in ORDERED_RULES:
            return _check_ordered_rule(d, path)
    elif rule in ARROW_RULES:
        return _check_arrow_rule(d, path)
    return _fail(path, f"rule {rule!r} not available in {sys.value}")


def _check_ax(d: Derivation, path: tuple[int, ...]) -> CheckResult:
    if d.premises:
        return _fail(path, "ax takes no premises")
    if len(d.basis.entries) != 1:
        return _fail(path, "ax needs a singleton basis")
    x, ty = d.basis.entries[0]
    if d.subject != Var(x):
        return _fail(path, "ax subject must be the basis variable")
    if d.ty != ty:
        return _fail(path, "ax type must match the basis entry")
    return _OK


def _check_structural(d: Derivation, path: tuple[int, ...]) -> CheckResult:
    if len(d.premises) != 1:
        return _fail(path, f"{d.rule} takes one premise")
    (p,) = d.premises
    if d.rule != "ctr" and d.subject != p.subject:
        return _fail(path, f"{d.rule} must not change the subject")
    if d.ty != p.ty:
        return _fail(path, f"{d.rule} must not change the type")

    pe = p.basis.entries
    ce = d.basis.entries
    if d.rule == "weak":
        # conclusion appends one fresh entry at the end
        if len(ce) != len(pe) + 1 or ce[:-1] != pe:
            return _fail(path, "weak appends exactly one entry")
        x, _ = ce[-1]
        if x in p.basis.vars():
            return _fail(path, "weakened variable already in basis")
        return _OK
    if d.rule == "ex":
        # conclusion swaps one adjacent pair
        if len(ce) != len(pe):
            return _fail(path, "ex preserves basis length")
        diffs = [i for i in range(len(ce)) if ce[i] != pe[i]]
        if len(diffs) != 2 or diffs[1] != diffs[0] + 1:
            return _fail(path, "ex swaps one adjacent pair")
        i = diffs[0]
        if ce[i] != pe[i + 1] or ce[i + 1] != pe[i]:
            return _fail(path, "ex swaps one adjacent pair")
        return _OK
    if d.rule == "ctr":
        # premise ends with x:t, y:t; conclusion keeps x and renames y to
        # x in the subject
        if len(pe) < 2 or len(ce) != len(pe) - 1:
            return _fail(path, "ctr drops exactly one entry")
        (x, tx), (y, ty) = pe[-2], pe[-1]
        if tx != ty:
            return _fail(path, "ctr needs equal types on the merged pair")
        if ce != pe[:-1]:
            return _fail(path, "ctr keeps the basis prefix")
        if d.subject != rename_free(p.subject, {y: x}):
            return _fail(path, "ctr must rename the dropped variable")
        return _OK
    raise AssertionError(d.rule)


def _check_arrow_rule(d: Derivation, path: tuple[int, ...]) -> CheckResult:
    arrow_cls = Lolli if d.system in (System.LINEAR, System.AFFINE) else Arrow
    if d.rule == "arrow_i":
        if len(d.premises) != 1:
            return _fail(path, "arrow_i takes one premise")
        (p,) = d.premises
        if not isinstance(d.subject, Abs):
            return _fail(path, "arrow_i concludes an abstraction")
        pe = p.basis.entries
        if not pe:
            return _fail(path, "arrow_i discharges the last basis entry")
        x, tx = pe[-1]
        if d.basis.entries != pe[:-1]:
            return _fail(path, "arrow_i keeps the basis prefix")
        if d.subject != Abs(x, p.subject):
            return _fail(path, "arrow_i subject must bind the discharged variable")
        if d.ty != arrow_cls(tx, p.ty):
            return _fail(path, "arrow_i type must be discharged arrow premise")
        return _OK
    if d.rule == "arrow_e":
        if len(d.premises) != 2:
            return _fail(path, "arrow_e takes two premises")
        pf, pa = d.premises
        if not isinstance(pf.ty, arrow_cls):
            return _fail(path, "arrow_e function premise needs an arrow type")
        if pf.ty.dom != pa.ty:
            return _fail(path, "arrow_e argument type must match the domain")
        if d.ty != pf.ty.cod:
            return _fail(path, "arrow_e concludes the codomain")
        if d.subject != App(pf.subject, pa.subject):
            return _fail(path, "arrow_e subject must apply fun to arg")
        if d.basis.entries != pf.basis.entries + pa.basis.entries:
            return _fail(path, "arrow_e basis is fun basis then arg basis")
        shared = set(pf.basis.vars()) & set(pa.basis.vars())
        if shared:
            return _fail(path, f"premise bases share {sorted(shared)}")
        return _OK
    raise AssertionError(d.rule)


def _check_ordered_rule(d: Derivation, path: tuple[int, ...]) -> CheckResult:
    if d.rule in ("arrow_i_l", "arrow_i_r"):
        if len(d.premises) != 1:
            return _fail(path, f"{d.rule} takes one premise")
        (p,) = d.premises
        if not isinstance(d.subject, Abs):
            return _fail(path, f"{d.rule} concludes an abstraction")
        pe = p.basis.entries
        if not pe:
            return _fail(path, f"{d.rule} discharges a basis entry")
        if d.rule == "arrow_i_l":
            # binder sits at the front of the premise basis
            x, tx = pe[0]
            rest = pe[1:]
            want: Type = LolliL(tx, p.ty)
        else:
            x, tx = pe[-1]
            rest = pe[:-1]
            want = LolliR(tx, p.ty)
        if d.basis.entries != rest:
            return _fail(path, f"{d.rule} keeps the remaining basis in order")
        if d.subject != Abs(x, p.subject):
            return _fail(path, f"{d.rule} subject must bind the discharged variable")
        if d.ty != want:
            return _fail(path, f"{d.rule} type must match the discharged entry")
        return _OK
    if d.rule in ("arrow_e_l", "arrow_e_r"):
        if len(d.premises) != 2:
            return _fail(path, f"{d.rule} takes two premises")
        pf, pa = d.premises
        arrow_cls = LolliL if d.rule == "arrow_e_l" else LolliR
        if not isinstance(pf.ty, arrow_cls):
            return _fail(path, f"{d.rule} function premise needs {arrow_cls.__name__}")
        if pf.ty.dom != pa.ty:
            return _fail(path, f"{d.rule} argument type must match the domain")
        if d.ty != pf.ty.cod:
            return _fail(path, f"{d.rule} concludes the codomain")
        if d.subject != App(pf.subject, pa.subject):
            return _fail(path, f"{d.rule} subject must apply fun to arg")
        if d.rule == "arrow_e_l":
            # argument basis lands on the left of the conclusion
            want_basis = pa.basis.entries + pf.basis.entries
        else:
            want_basis = pf.basis.entries + pa.basis.entries
        if d.basis.entries != want_basis:
            return _fail(path, f"{d.rule} arranges the premise bases the other way")
        shared = set(pf.basis.vars()) & set(pa.basis.vars())
        if shared:
            return _fail(path, f"premise bases share {sorted(shared)}")
        return _OK
    raise AssertionError(d.rule)


def rename_in_derivation(d: Derivation, ren: dict[str, str]) -> Derivation:
    """Rename free term variables throughout a derivation.

    The renaming is applied to basis entries and subjects consistently;
    binders shadow as usual.  Callers must pick targets that do not
    collide with existing names.
    """
    entries = tuple((ren.get(x, x), t) for x, t in d.basis.entries)
    subject = rename_free(d.subject, ren)
    prems = tuple(rename_in_derivation(p, ren) for p in d.premises)
    return Derivation(d.system, d.rule, Basis(entries), subject, d.ty, prems)


# ---------------------------------------------------------------------------
# derivation surgery: exchange chains, contraction, weakening


def _swap(d: Derivation, i: int) -> Derivation:
    """One ex step swapping basis positions i and i+1."""
    e = list(d.basis.entries)
    e[i], e[i + 1] = e[i + 1], e[i]
    return Derivation(d.system, "ex", Basis(tuple(e)), d.subject, d.ty, (d,))


def permute_basis(d: Derivation, order: tuple[str, ...]) -> Derivation:
    """Stack ex nodes until the basis lists variables in `order`.

    Insertion-sort style: bubble each variable into place left to right.
    Requires the system to admit ex unless the order already matches.
    """
    if d.basis.vars() == order:
        return d
    if "ex" not in STRUCTURAL[d.system]:
        raise ValueError("system admits no exchange")
    if sorted(d.basis.vars()) != sorted(order):
        raise ValueError("order must be a permutation of the basis")
    cur = d
    for target_pos, x in enumerate(order):
        pos = cur.basis.vars().index(x)
        while pos > target_pos:
            cur = _swap(cur, pos - 1)
            pos -= 1
    return cur


def _move_to_end(d: Derivation, x: str) -> Derivation:
    """Bubble variable x to the last basis position with ex nodes."""
    pos = d.basis.vars().index(x)
    cur = d
    while pos < len(cur.basis.entries) - 1:
        cur = _swap(cur, pos)
        pos += 1
    return cur


def _contract_pair(d: Derivation, x: str, y: str) -> Derivation:
    """Merge y into x: move both to the end, then one ctr node."""
    cur = _move_to_end(d, x)
    cur = _move_to_end(cur, y)
    entries = cur.basis.entries[:-1]
    subject = rename_free(cur.subject, {y: x})
    return Derivation(d.system, "ctr", Basis(entries), subject, d.ty, (cur,))


def _weaken(d: Derivation, x: str, ty: Type) -> Derivation:
    entries = d.basis.entries + ((x, ty),)
    return Derivation(d.system, "weak", Basis(entries), d.subject, d.ty, (d,))


# ---------------------------------------------------------------------------
# building derivations for the four set-like systems


def build_derivation(
    system: System,
    term: Term,
    var_types: dict[str, Type],
    supply: FreshSupply | None = None,
    basis_order: tuple[str, ...] | None = None,
) -> Derivation:
    """Build an explicit derivation for `term` in `system`.

    var_types assigns a type to every free and bound variable name (the
    term is assumed to follow the distinct-binder convention).  The
    construction is syntax-directed and inserts whatever structural
    nodes the term's variable usage demands; it raises ValueError when
    a demanded structural rule is not admitted.  `basis_order`, when
    given, fixes the root basis: variables it lists beyond the free
    variables of the term are weakened in.

    Not used for ordered derivations; check_ordered searches instead.
    """
    if system is System.ORDERED:
        raise ValueError("use check_ordered for the ordered system")
    if supply is None:
        supply = FreshSupply(all_names(term) | set(var_types))

    d = _build(system, term, var_types, supply)
    if basis_order is not None:
        present = set(d.basis.vars())
        for x in basis_order:
            if x not in present:
                if "weak" not in STRUCTURAL[system]:
                    raise ValueError(f"{system.value} cannot weaken in {x!r}")
                d = _weaken(d, x, var_types[x])
        d = permute_basis(d, basis_order)
    return d


def _build(
    system: System,
    term: Term,
    var_types: dict[str, Type],
    supply: FreshSupply,
) -> Derivation:
    """Core builder; the resulting basis lists the free variables of
    the term in first-occurrence order, one entry each."""
    match term:
        case Var(x):
            ty = var_types[x]
            return Derivation(system, "ax", Basis(((x, ty),)), term, ty)
        case Abs(x, body):
            tx = var_types[x]
            if x in free_vars(body):
                p = _build(system, body, var_types, supply)
                p = _move_to_end(p, x)
            else:
                if "weak" not in STRUCTURAL[system]:
                    raise ValueError(f"{system.value} cannot discharge unused {x!r}")
                p = _build(system, body, var_types, supply)
                p = _weaken(p, x, tx)
            arrow = _arrow_of(system, tx, p.ty)
            return Derivation(
                system,
                "arrow_i",
                Basis(p.basis.entries[:-1]),
                Abs(x, p.subject),
                arrow,
                (p,),
            )
        case App(f, a):
            df = _build(system, f, var_types, supply)
            da = _build(system, a, var_types, supply)
            overlap = [x for x in da.basis.vars() if x in set(df.basis.vars())]
            ren: dict[str, str] = {}
            for x in overlap:
                if "ctr" not in STRUCTURAL[system]:
                    raise ValueError(f"{system.value} cannot merge duplicated {x!r}")
                ren[x] = supply.fresh(x)
            if ren:
                da = rename_in_derivation(da, ren)
            dom, cod = _split_arrow(system, df.ty)
            if dom != da.ty:
                raise ValueError("argument type does not match the function domain")
            d = Derivation(
                system,
                "arrow_e",
                Basis(df.basis.entries + da.basis.entries),
                App(df.subject, da.subject),
                cod,
                (df, da),
            )
            for x, y in ren.items():
                d = _contract_pair(d, x, y)
            order = tuple(dict.fromkeys(_occurrence_order(term)))
            d = permute_basis(d, order)
            return d
    raise AssertionError


def _occurrence_order(t: Term, bound: frozenset[str] = frozenset()) -> list[str]:
    match t:
        case Var(x):
            return [] if x in bound else [x]
        case Abs(b, body):
            return _occurrence_order(body, bound | {b})
        case App(f, a):
            return _occurrence_order(f, bound) + _occurrence_order(a, bound)
    raise AssertionError


def _arrow_of(system: System, dom: Type, cod: Type) -> Type:
    if system in (System.LINEAR, System.AFFINE):
        return Lolli(dom, cod)
    return Arrow(dom, cod)


def _split_arrow(system: System, ty: Type) -> tuple[Type, Type]:
    if system in (System.LINEAR, System.AFFINE):
        if not isinstance(ty, Lolli):
            raise ValueError("function part is not a -o type")
        return ty.dom, ty.cod
    if not isinstance(ty, Arrow):
        raise ValueError("function part is not an arrow type")
    return ty.dom, ty.cod


# ---------------------------------------------------------------------------
# Curry-style inference (principal simple types via unification)


class _UVar:
    """Mutable unification variable; arrows are encoded as pairs."""

    __slots__ = ("link",)

    def __init__(self) -> None:
        self.link: object | None = None


def _uwalk(t: object) -> object:
    while isinstance(t, _UVar) and t.link is not None:
        t = t.link
    return t


def _uoccurs(v: _UVar, t: object) -> bool:
    t = _uwalk(t)
    if t is v:
        return True
    if isinstance(t, tuple):
        return _uoccurs(v, t[0]) or _uoccurs(v, t[1])
    return False


def _unify(a: object, b: object) -> bool:
    a, b = _uwalk(a), _uwalk(b)
    if a is b:
        return True
    if isinstance(a, _UVar):
        if _uoccurs(a, b):
            return False
        a.link = b
        return True
    if isinstance(b, _UVar):
        return _unify(b, a)
    if isinstance(a, tuple) and isinstance(b, tuple):
        return _unify(a[0], b[0]) and _unify(a[1], b[1])
    return a == b


def _curry_solve(term: Term):
    """Unification pass shared by the inference entry points.

    Returns None when untypable, else (raw subject type, raw types of
    the free variables, raw types of the binders seen along the way).
    Binder records are keyed by (binder name, body) so shadowed names
    stay apart even on non-canonical input.
    """
    env: dict[str, object] = {x: _UVar() for x in free_vars(term)}
    binders: list[tuple[Abs, object]] = []

    def go(t: Term, env: dict[str, object]) -> object | None:
        match t:
            case Var(x):
                return env[x]
            case Abs(b, body):
                v = _UVar()
                binders.append((t, v))
                r = go(body, {**env, b: v})
                return None if r is None else (v, r)
            case App(f, a):
                tf = go(f, env)
                ta = go(a, env)
                if tf is None or ta is None:
                    return None
                res = _UVar()
                return res if _unify(tf, (ta, res)) else None
        raise AssertionError

    raw = go(term, env)
    if raw is None:
        return None
    return raw, env, binders


def _freezer():
    names = _tvar_names()
    seen: dict[int, SimpleType] = {}

    def freeze(t: object) -> SimpleType:
        t = _uwalk(t)
        if isinstance(t, _UVar):
            if id(t) not in seen:
                seen[id(t)] = TVar(next(names))
            return seen[id(t)]
        if isinstance(t, tuple):
            return Arrow(freeze(t[0]), freeze(t[1]))
        raise AssertionError(t)

    return freeze


def infer_curry(term: Term) -> SimpleType | None:
    """Principal simple type of a term, or None when untypable.

    Open terms are accepted; free variables get their own inferred
    types but only the subject's type is returned.  Type variables in
    the result are named a, b, c, ... in first-occurrence order.
    """
    solved = _curry_solve(term)
    if solved is None:
        return None
    raw, _, _ = solved
    return _freezer()(raw)


def infer_curry_pair(term: Term) -> tuple[SimpleType, Basis] | None:
    """Principal type together with the minimal basis for the free variables.

    The subject type is named exactly as by infer_curry; basis entries
    follow first free occurrence order and share the same naming pass.
    """
    solved = _curry_solve(term)
    if solved is None:
        return None
    raw, env, _ = solved
    freeze = _freezer()
    ty = freeze(raw)
    basis = Basis(tuple((x, freeze(env[x])) for x in free_vars(term)))
    return ty, basis


def _tvar_names() -> Iterator[str]:
    letters = "abcdefghijklmnopqrstuvwxyz"
    yield from letters
    for i in count(1):
        for c in letters:
            yield f"{c}{i}"


def to_linear(t: SimpleType) -> Type:
    """Map -> to -o structurally."""
    match t:
        case TVar(_):
            return t
        case Arrow(dom, cod):
            return Lolli(to_linear(dom), to_linear(cod))
    raise AssertionError(t)


def decide(system: System, term: Term) -> Derivation | None:
    """Decision procedure with a checkable witness derivation.

    Characterisations: curry is plain simple typability; relevant adds
    that every binder is used; affine requires every variable to occur
    at most once; linear exactly once.  The witness derivation types
    the canonicalized term at its principal type, with -o arrows for
    affine and linear.
    """
    cls = classify(term)
    gate = {
        System.CURRY: True,
        System.RELEVANT: cls.is_lambda_i,
        System.AFFINE: cls.is_affine,
        System.LINEAR: cls.is_linear,
    }
    if system not in gate:
        raise ValueError("decide covers the set-like systems only")
    if not gate[system]:
        return None
    subject = canonicalize(term, FreshSupply())
    solved = _curry_solve(subject)
    if solved is None:
        return None
    raw, env, binders = solved
    freeze = _freezer()
    freeze(raw)  # subject-type variables get the infer_curry names
    conv = to_linear if system in (System.LINEAR, System.AFFINE) else (lambda t: t)
    var_types = {x: conv(freeze(env[x])) for x in free_vars(subject)}
    for node, v in binders:
        var_types[node.binder] = conv(freeze(v))
    return build_derivation(system, subject, var_types)


# ---------------------------------------------------------------------------
# ordered typability: backtracking proof search


class SizeBoundExceeded(Exception):
    """Raised when the ordered search exceeds its node budget."""


class _MVar:
    """Metavariable for unknown ordered types during search."""

    __slots__ = ("link",)

    def __init__(self) -> None:
        self.link: object | None = None


def _mwalk(t: object) -> object:
    while isinstance(t, _MVar) and t.link is not None:
        t = t.link
    return t


def _moccurs(v: _MVar, t: object) -> bool:
    t = _mwalk(t)
    if t is v:
        return True
    if isinstance(t, (LolliL, LolliR)):
        return _moccurs(v, t.dom) or _moccurs(v, t.cod)
    return False


class _Trail:
    """Undo log for metavariable bindings."""

    def __init__(self) -> None:
        self._log: list[_MVar] = []

    def mark(self) -> int:
        return len(self._log)

    def bind(self, v: _MVar, t: object) -> None:
        v.link = t
        self._log.append(v)

    def undo(self, mark: int) -> None:
        while len(self._log) > mark:
            self._log.pop().link = None


def _munify(a: object, b: object, trail: _Trail) -> bool:
    a, b = _mwalk(a), _mwalk(b)
    if a is b:
        return True
    if isinstance(a, _MVar):
        if _moccurs(a, b):
            return False
        trail.bind(a, b)
        return True
    if isinstance(b, _MVar):
        return _munify(b, a, trail)
    if isinstance(a, LolliL) and isinstance(b, LolliL):
        return _munify(a.dom, b.dom, trail) and _munify(a.cod, b.cod, trail)
    if isinstance(a, LolliR) and isinstance(b, LolliR):
        return _munify(a.dom, b.dom, trail) and _munify(a.cod, b.cod, trail)
    return a == b


def _mground(t: object) -> bool:
    t = _mwalk(t)
    if isinstance(t, _MVar):
        return False
    if isinstance(t, (LolliL, LolliR)):
        return _mground(t.dom) and _mground(t.cod)
    return True


def _mkey(t: object) -> object:
    t = _mwalk(t)
    if isinstance(t, LolliL):
        return ("l", _mkey(t.dom), _mkey(t.cod))
    if isinstance(t, LolliR):
        return ("r", _mkey(t.dom), _mkey(t.cod))
    return t


class _OrderedSearch:
    """Backtracking proof search for the ordered system.

    solutions() is a generator: each yield leaves the trail holding the
    bindings of one proof, and resuming undoes them before the next
    alternative is tried.  Ground goals are memoised both ways since no
    bindings can escape them.  Every recursive call shrinks the subject,
    so the search always terminates; the node budget only guards against
    combinatorial blowup on wide applications.
    """

    def __init__(self, budget: int) -> None:
        self.budget = budget
        self.nodes = 0
        self.trail = _Trail()
        self.failed: set[object] = set()
        self.proved: set[object] = set()

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise SizeBoundExceeded(f"ordered search exceeded {self.budget} nodes")

    def solutions(
        self, entries: tuple[tuple[str, object], ...], t: Term, goal: object
    ) -> Iterator[None]:
        self.tick()
        key = None
        if _mground(goal) and all(_mground(ty) for _, ty in entries):
            key = (tuple((x, _mkey(ty)) for x, ty in entries), t, _mkey(goal))
            if key in self.failed:
                return
            if key in self.proved:
                yield None
                return
        produced = False
        for s in self._solutions(entries, t, goal):
            produced = True
            yield s
            if key is not None:
                # ground goals have at most one distinguishable solution
                self.proved.add(key)
                return
        if key is not None and not produced:
            self.failed.add(key)

    def _solutions(
        self, entries: tuple[tuple[str, object], ...], t: Term, goal: object
    ) -> Iterator[None]:
        trail = self.trail
        match t:
            case Var(x):
                if len(entries) == 1 and entries[0][0] == x:
                    mark = trail.mark()
                    if _munify(entries[0][1], goal, trail):
                        yield None
                    trail.undo(mark)
            case Abs(b, body):
                # binder joins the basis at the end (right abstraction)
                mark = trail.mark()
                dom, cod = _MVar(), _MVar()
                if _munify(goal, LolliR(dom, cod), trail):
                    yield from self.solutions(entries + ((b, dom),), body, cod)
                trail.undo(mark)
                # binder joins the basis at the front (left abstraction)
                mark = trail.mark()
                dom, cod = _MVar(), _MVar()
                if _munify(goal, LolliL(dom, cod), trail):
                    yield from self.solutions(((b, dom),) + entries, body, cod)
                trail.undo(mark)
            case App(f, a):
                # right elimination: fun takes the prefix, arg the suffix
                for i in range(len(entries) + 1):
                    mark = trail.mark()
                    dom = _MVar()
                    for _ in self.solutions(entries[:i], f, LolliR(dom, goal)):
                        yield from self.solutions(entries[i:], a, dom)
                    trail.undo(mark)
                # left elimination: arg takes the prefix, fun the suffix
                for i in range(len(entries) + 1):
                    mark = trail.mark()
                    dom = _MVar()
                    for _ in self.solutions(entries[i:], f, LolliL(dom, goal)):
                        yield from self.solutions(entries[:i], a, dom)
                    trail.undo(mark)
            case _:
                raise AssertionError


def check_ordered(
    basis: Basis, term: Term, ty: OrderedType, budget: int = 100_000
) -> bool:
    """Does basis |- term : ty hold in the ordered system?

    Backtracking search over the six rules; type variables in the basis
    and the goal are rigid.  Raises SizeBoundExceeded past the budget.
    """
    search = _OrderedSearch(budget)
    for _ in search.solutions(tuple(basis.entries), term, ty):
        return True
    return False


def infer_ordered(
    basis: Basis, term: Term, budget: int = 100_000
) -> OrderedType | None:
    """Search for any ordered type of term under the given basis.

    The goal starts as a metavariable; the first solution is frozen and
    returned, with leftover metavariables instantiated by fresh type
    variables.  None when the search space is exhausted.
    """
    search = _OrderedSearch(budget)
    goal = _MVar()
    fresh = _tvar_names()
    taken = {e[1] for e in basis.entries}

    def ground(t: object) -> OrderedType:
        t = _mwalk(t)
        if isinstance(t, _MVar):
            g = TVar(next(fresh))
            while g in taken:
                g = TVar(next(fresh))
            t.link = g
            return g
        if isinstance(t, LolliL):
            return LolliL(ground(t.dom), ground(t.cod))
        if isinstance(t, LolliR):
            return LolliR(ground(t.dom), ground(t.cod))
        return t  # type: ignore[return-value]

    for _ in search.solutions(tuple(basis.entries), term, goal):
        return ground(goal)
    return None
