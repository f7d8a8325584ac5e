"""Exhaustive small-term corpora and a cross-module property matrix.

The rest of the package states what single functions do; this module states
what they do *to each other*: typability against normalization, the decision
procedures against the syntactic term classes, expansion against its target
checkers and context laws, the reduction diagrams, and the substitution and
distribution identities that tie the context algebra together.

Everything here is deterministic.  Corpora are either exhaustive
enumerations of all terms up to a size cap (one representative per
alpha-equivalence class) or explicit golden lists; the only randomness is an
optional generator that takes its seed as an argument.  Each property maps a
term to a verdict — ``ok``, ``vacuous`` (premise unmet), ``collected`` (an
anomaly the contract expects to exist and wants counted), or ``fail`` — and
``run_matrix`` crosses a corpus with the registry and returns reports that
serialize to JSON.
"""

from __future__ import annotations

import itertools
import json
import random
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass

from .terms import (
    Abs,
    App,
    FreshSupply,
    Term,
    Var,
    all_names,
    alpha_eq,
    canonicalize,
    classify,
    count_free_occurrences,
    free_vars,
    rename_free,
    simultaneous_substitute,
    size,
)
from .reduction import Strategy, beta_step, reduce
from .typelang import (
    Flavor,
    InterArrow,
    InterType,
    ListExpCtx,
    SetExpCtx,
    Target,
    TVar,
    TypeEnv,
    ctx_match,
    ctx_to_basis,
    ctx_union,
    ctx_append,
    env_eq,
    env_meet,
    env_to_set_ctx,
    set_ctx_to_env,
    translate,
)
from .systems import System, check_derivation, decide, infer_curry
from .intersection import InterDerivation, check_inter, infer, subject_reduce
from .expansion import (
    ExpansionError,
    OrderViolation,
    expand,
    verify_beta_diagram_lambdai,
    verify_whd_diagram,
)

__all__ = [
    "CAP",
    "CapExceeded",
    "enumerate_terms",
    "enumerate_types",
    "enumerate_environments",
    "random_simply_typable",
    "Corpus",
    "enumerated_corpus",
    "golden_corpus",
    "FILTERS",
    "Verdict",
    "PropertyReport",
    "PROPERTIES",
    "run_matrix",
    "summarize",
    "reports_to_json",
    "env_union_distributes",
    "collapse_distributes",
    "substitution_composes",
]


# --------------------------------------------------------------------------
# term enumeration

CAP = 9
"""Hard ceiling on enumeration size (constructor count).  Counts grow fast
enough that anything beyond this stops being a "desk check" and starts being
a batch job."""


class CapExceeded(ValueError):
    """Requested an enumeration larger than the size cap."""


def enumerate_terms(max_size: int, closed_only: bool = True) -> list[Term]:
    """Every term of size at most ``max_size``, one per alpha class.

    Size is the constructor count (variables, abstractions and applications
    all cost one).  Binders are named ``x1, x2, ...`` by nesting depth and
    free variables ``v1, v2, ...`` in order of first occurrence, so the
    naming is canonical: two distinct results are never alpha-equivalent,
    and every alpha class of the right size has exactly one representative.
    """
    if max_size > CAP:
        raise CapExceeded(f"max_size {max_size} exceeds the enumeration cap {CAP}")

    def gen(n: int, depth: int, frees: int) -> Iterator[tuple[Term, int]]:
        # Yields (term, frees') with the free-variable counter threaded
        # left to right, which pins first-occurrence naming.
        if n == 1:
            for k in range(1, depth + 1):
                yield Var(f"x{k}"), frees
            if not closed_only:
                for j in range(1, frees + 1):
                    yield Var(f"v{j}"), frees
                yield Var(f"v{frees + 1}"), frees + 1
            return
        for body, f2 in gen(n - 1, depth + 1, frees):
            yield Abs(f"x{depth + 1}", body), f2
        for i in range(1, n - 1):
            for fun, f1 in gen(i, depth, frees):
                for arg, f2 in gen(n - 1 - i, depth, f1):
                    yield App(fun, arg), f2

    out: list[Term] = []
    for n in range(1, max_size + 1):
        out.extend(t for t, _ in gen(n, 0, 0))
    return out


def enumerate_types(
    max_depth: int, max_arity: int, atoms: tuple[str, ...] = ("a", "b")
) -> list[InterType]:
    """All intersection types over ``atoms`` with bounded shape.

    Atoms have depth one; an arrow is one deeper than its deepest part and
    carries between one and ``max_arity`` domain members.
    """
    current: list[InterType] = [TVar(a) for a in atoms]
    for _ in range(max_depth - 1):
        grown = list(current)
        for n in range(1, max_arity + 1):
            for doms in itertools.product(current, repeat=n):
                for cod in current:
                    grown.append(InterArrow(tuple(doms), cod))
        current = list(dict.fromkeys(grown))
    return current


def enumerate_environments(
    variables: tuple[str, ...], types: Iterable[InterType], max_arity: int
) -> Iterator[TypeEnv]:
    """Every environment over ``variables`` whose member lists draw from
    ``types`` with at most ``max_arity`` members each; variables may also be
    absent entirely."""
    pool = list(types)
    options: list[tuple[InterType, ...] | None] = [None]
    for n in range(1, max_arity + 1):
        options.extend(itertools.product(pool, repeat=n))
    for combo in itertools.product(options, repeat=len(variables)):
        yield {v: ms for v, ms in zip(variables, combo) if ms is not None}


def random_simply_typable(
    count: int, max_size: int = CAP, seed: int = 0
) -> list[Term]:
    """Deterministic sample of closed, simply-typable terms.

    Rejection-samples random closed shapes with the given seed and keeps
    those the unrestricted-system inference accepts, so the output is usable
    wherever a typable input is a precondition rather than the thing under
    test.
    """
    if max_size < 2:
        raise ValueError("closed terms need size at least 2")
    rng = random.Random(seed)

    def grow(n: int, bound: list[str]) -> Term:
        if n == 1:
            return Var(rng.choice(bound))
        if n == 2 or not bound or rng.random() < 0.4:
            binder = f"x{len(bound) + 1}"
            return Abs(binder, grow(n - 1, bound + [binder]))
        i = rng.randint(1, n - 2)
        return App(grow(i, bound), grow(n - 1 - i, bound))

    out: list[Term] = []
    attempts = 0
    while len(out) < count and attempts < 200 * count:
        attempts += 1
        t = grow(rng.randint(2, max_size), [])
        if infer_curry(t) is not None:
            out.append(t)
    if len(out) < count:
        raise RuntimeError("rejection sampling starved; widen max_size")
    return out


# --------------------------------------------------------------------------
# corpora

@dataclass(frozen=True)
class Corpus:
    """A named list of subject terms, in a fixed order."""

    name: str
    terms: tuple[Term, ...]

    def __len__(self) -> int:
        return len(self.terms)


FILTERS: dict[str, Callable[[Term], bool]] = {
    "lambda-i": lambda t: classify(t).is_lambda_i,
    "affine": lambda t: classify(t).is_affine,
    "linear": lambda t: classify(t).is_linear,
    "typable": lambda t: infer(t) is not None,
}
"""Named corpus filters; "typable" means intersection-typable within the
default fuel, which for terms this small is the same as normalizing."""


def enumerated_corpus(
    max_size: int,
    closed_only: bool = True,
    keep: str | None = None,
    name: str | None = None,
) -> Corpus:
    """Exhaustive corpus up to ``max_size``, optionally through a named
    filter from ``FILTERS``."""
    terms: Iterable[Term] = enumerate_terms(max_size, closed_only=closed_only)
    if keep is not None:
        terms = filter(FILTERS[keep], terms)
    shape = "closed" if closed_only else "open"
    label = name or f"{keep or 'all'}-{shape}-le-{max_size}"
    return Corpus(label, tuple(terms))


def golden_corpus(name: str, terms: Iterable[Term]) -> Corpus:
    """Corpus from an explicit list of subject terms."""
    return Corpus(name, tuple(terms))


# --------------------------------------------------------------------------
# verdicts and reports

_STATUSES = ("ok", "vacuous", "collected", "fail")


@dataclass(frozen=True)
class Verdict:
    """Outcome of one property on one subject.

    ``vacuous`` means the property's premise did not apply; ``collected``
    means an anomaly that the contract expects to occur and wants counted
    rather than hidden (it does not fail the report on its own).
    """

    subject: Term
    status: str
    note: str = ""

    def __post_init__(self) -> None:
        if self.status not in _STATUSES:
            raise ValueError(f"unknown verdict status {self.status!r}")

    @property
    def ok(self) -> bool:
        return self.status != "fail"


@dataclass(frozen=True)
class PropertyReport:
    """All verdicts of one property over one corpus."""

    prop: str
    corpus: str
    verdicts: tuple[Verdict, ...]

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts)

    def tally(self, status: str) -> int:
        return sum(1 for v in self.verdicts if v.status == status)

    def failures(self) -> list[Verdict]:
        return [v for v in self.verdicts if v.status == "fail"]

    def collected(self) -> list[Verdict]:
        return [v for v in self.verdicts if v.status == "collected"]

    def to_dict(self) -> dict:
        from .syntax import render_term

        return {
            "property": self.prop,
            "corpus": self.corpus,
            "instances": len(self.verdicts),
            "ok": self.tally("ok"),
            "vacuous": self.tally("vacuous"),
            "collected": [
                {"term": render_term(v.subject), "note": v.note}
                for v in self.collected()
            ],
            "failures": [
                {"term": render_term(v.subject), "note": v.note}
                for v in self.failures()
            ],
            "passed": self.ok,
        }


def run_matrix(
    corpus: Corpus, properties: Iterable[str] | None = None
) -> tuple[PropertyReport, ...]:
    """Run every requested property over every corpus term, in order.

    The result depends only on the corpus and the property list; reruns
    produce identical reports.
    """
    ids = list(properties) if properties is not None else list(PROPERTIES)
    unknown = [p for p in ids if p not in PROPERTIES]
    if unknown:
        raise KeyError(f"unknown properties: {unknown}")
    reports = []
    for pid in ids:
        fn = PROPERTIES[pid]
        verdicts = tuple(Verdict(t, *fn(t)) for t in corpus.terms)
        reports.append(PropertyReport(pid, corpus.name, verdicts))
    return tuple(reports)


def summarize(reports: Iterable[PropertyReport]) -> str:
    """Fixed-width text table, one row per report."""
    rows = [("property", "corpus", "cases", "ok", "vacuous", "collected", "fail")]
    for r in reports:
        rows.append(
            (
                r.prop,
                r.corpus,
                str(len(r.verdicts)),
                str(r.tally("ok")),
                str(r.tally("vacuous")),
                str(r.tally("collected")),
                str(r.tally("fail")),
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = [
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
        for row in rows
    ]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def reports_to_json(reports: Iterable[PropertyReport], indent: int | None = 2) -> str:
    return json.dumps({"reports": [r.to_dict() for r in reports]}, indent=indent)


# --------------------------------------------------------------------------
# context-algebra identities

def env_union_distributes(g1: TypeEnv, g2: TypeEnv) -> tuple[bool, str]:
    """Drawing fresh variables for two environments separately and joining
    the results matches drawing for their meet, up to renaming."""
    reserved = set(g1) | set(g2)
    supply = FreshSupply(reserved)
    left = ctx_union(env_to_set_ctx(g1, supply), env_to_set_ctx(g2, supply))
    right = env_to_set_ctx(env_meet(g1, g2), FreshSupply(reserved))
    for _ in ctx_match(left, right, Flavor.AC):
        return True, ""
    return False, "union of the drawn contexts differs from drawing for the meet"


def collapse_distributes(g1: TypeEnv, g2: TypeEnv) -> tuple[bool, str]:
    """Collapsing two disjointly drawn contexts back onto their owners
    commutes with joining them first."""
    reserved = set(g1) | set(g2)
    supply = FreshSupply(reserved)
    a1 = env_to_set_ctx(g1, supply)
    a2 = env_to_set_ctx(g2, supply)
    lhs = env_meet(set_ctx_to_env(a1), set_ctx_to_env(a2))
    rhs = set_ctx_to_env(ctx_union(a1, a2))
    if env_eq(lhs, rhs, Flavor.AC):
        return True, ""
    return False, "meet of the collapses differs from collapsing the union"


# --------------------------------------------------------------------------
# substitution composition (two routes to an expansion of a contractum)

def _match_modulo_renaming(
    term_a: Term, ctx_a, term_b: Term, ctx_b, flavor: Flavor
) -> bool:
    """Does some context renaming carry (term_a, ctx_a) onto (term_b, ctx_b)?"""
    names = all_names(term_a) | all_names(term_b)
    for ren in ctx_match(ctx_a, ctx_b, flavor):
        safe = canonicalize(term_a, FreshSupply(names | set(ren.values())))
        if alpha_eq(rename_free(safe, ren), term_b):
            return True
    return False


def substitution_composes(t: Term, flavor: Flavor) -> tuple[str, str]:
    """Compare two routes from a top-level redex to an expansion of its
    contractum.

    Route one expands the body and the argument premises separately with a
    shared supply and substitutes each drawn variable of the bound name by
    its own copy of the expanded argument, joining the leftover contexts.
    Route two contracts the redex first, transports the derivation, and
    expands the result.  The two must agree up to renaming of the drawn
    variables.
    """
    match t:
        case App(fun=Abs(), arg=_):
            pass
        case _:
            return "vacuous", "not a top-level redex"
    d = infer(t)
    if d is None:
        return "vacuous", "no derivation"
    if flavor is Flavor.A and not classify(d.subject).is_lambda_i:
        return "vacuous", "the ordered route is stated on lambda-I subjects"
    redex_fun = d.premises[0]
    args = list(d.premises[1:])
    body = redex_fun.premises[0]
    x = d.subject.fun.binder
    supply = FreshSupply(all_names(d.subject))

    try:
        rb = expand(body, flavor, supply=supply)
    except OrderViolation as exc:
        return "collected", f"order violation expanding the body: {exc}"

    try:
        if flavor is Flavor.A:
            composed = _compose_ordered(rb, x, args, supply)
        else:
            composed = _compose_set(rb, x, args, flavor, supply)
    except OrderViolation as exc:
        return "collected", f"order violation expanding an argument: {exc}"
    if isinstance(composed, str):
        return "collected", composed
    rhs_term, rhs_ctx = composed

    reduct = beta_step(d.subject, ())
    d2 = subject_reduce(d, reduct, ())
    try:
        r2 = expand(d2, flavor)
    except OrderViolation as exc:
        return "collected", f"order violation on the direct route: {exc}"

    if rb.ty != r2.ty:
        return "fail", "the two routes give different result types"
    if _match_modulo_renaming(rhs_term, rhs_ctx, r2.expanded, r2.context, flavor):
        return "ok", ""
    return "fail", "substituting expanded parts differs from expanding the reduct"


def _compose_set(
    rb, x: str, args: list[InterDerivation], flavor: Flavor, supply: FreshSupply
) -> tuple[Term, SetExpCtx]:
    """Set-context composition: pair each drawn variable of ``x`` with an
    argument premise of the same type, expand, substitute, join."""
    xgroup = dict(rb.context.groups.get(x, {}))
    rest = SetExpCtx({v: dict(g) for v, g in rb.context.groups.items() if v != x})
    pool: list[InterDerivation | None] = list(args)
    bindings: list[tuple[str, Term]] = []
    ctxs: list[SetExpCtx] = []
    for y, ty in xgroup.items():
        for i, p in enumerate(pool):
            if p is not None and p.ty == ty:
                pool[i] = None
                ra = expand(p, flavor, supply=supply)
                bindings.append((y, ra.expanded))
                ctxs.append(ra.context)
                break
        else:
            raise ExpansionError(f"no argument premise at the type drawn for {y}")
    rhs_term = simultaneous_substitute(rb.expanded, bindings)
    rhs_ctx = rest
    for c in ctxs:
        rhs_ctx = ctx_union(rhs_ctx, c)
    return rhs_term, rhs_ctx


def _compose_ordered(
    rb, x: str, args: list[InterDerivation], supply: FreshSupply
) -> tuple[Term, ListExpCtx] | str:
    """Ordered composition: splice the argument contexts at the position of
    the group the bound name owns.  Returns a note instead when the body's
    context does not present that group contiguously."""
    groups = [(v, list(g)) for v, g in rb.context.groups]
    idxs = [i for i, (v, _) in enumerate(groups) if v == x]
    if len(idxs) != 1:
        return (
            "the bound name's drawn variables are not one contiguous group, "
            "so the spliced form is not defined on this instance"
        )
    idx = idxs[0]
    entries = groups[idx][1]
    if len(entries) != len(args):
        raise ExpansionError("drawn-variable count differs from premise count")
    bindings: list[tuple[str, Term]] = []
    arg_ctxs: list[ListExpCtx] = []
    for (y, oty), p in zip(entries, args):
        if translate(p.ty, Target.ORDERED) != oty:
            raise ExpansionError(f"premise type does not match the type drawn for {y}")
        ra = expand(p, Flavor.A, supply=supply)
        bindings.append((y, ra.expanded))
        arg_ctxs.append(ra.context)
    rhs_term = simultaneous_substitute(rb.expanded, bindings)
    rhs_ctx = ListExpCtx([(v, list(g)) for v, g in groups[:idx]])
    for c in arg_ctxs:
        rhs_ctx = ctx_append(rhs_ctx, c)
    rhs_ctx = ctx_append(rhs_ctx, ListExpCtx([(v, list(g)) for v, g in groups[idx + 1 :]]))
    return rhs_term, rhs_ctx


# --------------------------------------------------------------------------
# per-term properties

_FLAVOR_LABEL = {Flavor.ACI: "aci", Flavor.AC: "ac", Flavor.A: "ordered"}


def _prop_typable_iff_normalizing(t: Term) -> tuple[str, str]:
    d = infer(t)
    r = reduce(t, Strategy.LEFTMOST)
    normalizes = r.status == "normal-form"
    if (d is not None) == normalizes:
        return "ok", ""
    return (
        "fail",
        f"inference {'succeeded' if d is not None else 'failed'} but leftmost "
        f"reduction {'terminated' if normalizes else 'did not terminate'}",
    )


def _prop_inference_replay_checks(t: Term) -> tuple[str, str]:
    d = infer(t)
    if d is None:
        return "vacuous", "no derivation"
    if not alpha_eq(d.subject, t):
        return "fail", "inference changed the subject"
    if set(d.environment()) != set(free_vars(d.subject)):
        return "fail", "environment does not cover exactly the free names"
    for flavor in (Flavor.ACI, Flavor.AC, Flavor.A):
        res = check_inter(d, flavor)
        if not res.ok:
            return "fail", f"{_FLAVOR_LABEL[flavor]} check: {res.reason}"
    r = reduce(t, Strategy.LEFTMOST)
    if r.status != "normal-form":
        return "fail", "typable subject did not normalize"
    return "ok", ""


def _decision_matches(system: System, wanted: bool, t: Term) -> tuple[str, str]:
    got = decide(system, t)
    if (got is not None) != wanted:
        verb = "accepted" if got is not None else "rejected"
        return "fail", f"{system.value} decision {verb} a term the class says otherwise"
    if got is not None:
        res = check_derivation(got)
        if not res.ok:
            return "fail", f"returned derivation fails its checker: {res.reason}"
        if not alpha_eq(got.subject, t):
            return "fail", "decision changed the subject"
    return "ok", ""


def _prop_affine_decision(t: Term) -> tuple[str, str]:
    return _decision_matches(System.AFFINE, classify(t).is_affine, t)


def _prop_linear_decision(t: Term) -> tuple[str, str]:
    return _decision_matches(System.LINEAR, classify(t).is_linear, t)


_TARGETS = {Flavor.ACI: Target.SIMPLE, Flavor.AC: Target.LINEAR, Flavor.A: Target.ORDERED}


def _expansion_or_verdict(t: Term, flavor: Flavor):
    """Shared preamble: derivation plus expansion, or an early verdict."""
    d = infer(t)
    if d is None:
        return "vacuous", "no derivation"
    if flavor is Flavor.A and not classify(d.subject).is_lambda_i:
        return "vacuous", "ordered expansion needs a lambda-I subject"
    try:
        return d, expand(d, flavor)
    except OrderViolation as exc:
        return "collected", f"order violation: {exc}"


def _prop_expansion_checks(flavor: Flavor):
    def prop(t: Term) -> tuple[str, str]:
        got = _expansion_or_verdict(t, flavor)
        if isinstance(got[0], str):
            return got
        d, r = got
        res = check_derivation(r.induced)
        if not res.ok:
            return "fail", f"induced derivation fails its checker: {res.reason}"
        if r.ty != translate(d.ty, _TARGETS[flavor]):
            return "fail", "result type is not the translated source type"
        if r.induced.basis != ctx_to_basis(r.context, _TARGETS[flavor]):
            return "fail", "induced basis does not render the context"
        if not alpha_eq(r.induced.subject, r.expanded):
            return "fail", "induced derivation is not about the expanded term"
        if flavor is not Flavor.A and classify(d.subject).is_lambda_i:
            if r.strict is None:
                return "fail", "lambda-I subject lost its strict derivation"
            strict_res = check_derivation(r.strict)
            if not strict_res.ok:
                return "fail", f"strict derivation fails: {strict_res.reason}"
        want = classify(r.expanded)
        if flavor is Flavor.ACI and classify(d.subject).is_lambda_i and not want.is_lambda_i:
            return "fail", "expansion of a lambda-I subject left lambda-I"
        if flavor is Flavor.AC and not want.is_affine:
            return "fail", "multiset expansion produced a non-affine term"
        if flavor is Flavor.A and not want.is_linear:
            return "fail", "ordered expansion produced a non-linear term"
        return "ok", ""

    return prop


def _prop_expansion_context_laws(flavor: Flavor):
    def prop(t: Term) -> tuple[str, str]:
        got = _expansion_or_verdict(t, flavor)
        if isinstance(got[0], str):
            return got
        d, r = got
        drawn = env_to_set_ctx(d.environment(), FreshSupply(all_names(d.subject)))
        if not any(True for _ in ctx_match(r.context, drawn, flavor)):
            return "fail", "context differs from drawing fresh names for the environment"
        if not env_eq(set_ctx_to_env(r.context), d.environment(), flavor):
            return "fail", "collapsing the context does not give back the environment"
        return "ok", ""

    return prop


def _prop_expansion_occurrences(flavor: Flavor):
    def prop(t: Term) -> tuple[str, str]:
        got = _expansion_or_verdict(t, flavor)
        if isinstance(got[0], str):
            return got
        d, r = got
        subject = d.subject
        if flavor is Flavor.A:
            groups = [(v, [y for y, _ in g]) for v, g in r.context.groups]
        else:
            groups = [(v, list(g)) for v, g in r.context.groups.items()]
        seen: dict[str, int] = {}
        for owner, names in groups:
            seen[owner] = seen.get(owner, 0) + len(names)
            for y in names:
                c = count_free_occurrences(r.expanded, y)
                if flavor is Flavor.ACI:
                    if c < 1:
                        return "fail", f"drawn variable {y} vanished from the expansion"
                elif c != 1:
                    return "fail", f"drawn variable {y} occurs {c} times, wanted exactly 1"
        for owner in free_vars(subject):
            if owner not in seen:
                return "fail", f"free name {owner} drew no variables"
        for owner, k in seen.items():
            occ = count_free_occurrences(subject, owner)
            if occ == 0:
                return "fail", f"{owner} owns drawn variables but never occurs"
            if k < occ:
                return "fail", f"{owner}: {k} drawn variables for {occ} occurrences"
        return "ok", ""

    return prop


def _prop_whd_diagram(flavor: Flavor):
    def prop(t: Term) -> tuple[str, str]:
        try:
            rep = verify_whd_diagram(t, flavor, fuel=1000)
        except ExpansionError:
            return "vacuous", "no derivation"
        if rep.ok:
            return "ok", ""
        bad = next(s for s in rep.steps if not s.ok)
        return "fail", bad.reason or "weak-head step did not close"

    return prop


def _prop_beta_diagram_li(flavor: Flavor):
    def prop(t: Term) -> tuple[str, str]:
        if not classify(t).is_lambda_i:
            return "vacuous", "not a lambda-I term"
        try:
            rep = verify_beta_diagram_lambdai(t, flavor, fuel=1000)
        except ExpansionError:
            return "vacuous", "no derivation"
        if rep.ok:
            return "ok", ""
        bad = next(s for s in rep.steps if not s.ok)
        return "fail", bad.reason or "beta step did not close"

    return prop


def _prop_beta_diagram_unrestricted(flavor: Flavor):
    def prop(t: Term) -> tuple[str, str]:
        try:
            rep = verify_beta_diagram_lambdai(t, flavor, fuel=1000)
        except ExpansionError:
            return "vacuous", "no derivation"
        if rep.ok:
            return "ok", ""
        if classify(t).is_lambda_i:
            bad = next(s for s in rep.steps if not s.ok)
            return "fail", bad.reason or "beta step did not close on a lambda-I term"
        return "collected", "erasing step does not preserve the context, as documented"

    return prop


def _prop_substitution_composes(flavor: Flavor):
    def prop(t: Term) -> tuple[str, str]:
        return substitution_composes(t, flavor)

    return prop


def _prop_linear_steps_bounded(t: Term) -> tuple[str, str]:
    if not classify(t).is_linear:
        return "vacuous", "not a linear term"
    bound = size(t)
    r = reduce(t, Strategy.LEFTMOST, fuel=bound + 1)
    if r.status != "normal-form":
        return "fail", "linear term failed to normalize within its size in steps"
    steps = len(r.trace)
    if steps > bound:
        return "fail", f"{steps} steps for size {bound}"
    return "ok", ""


PROPERTIES: dict[str, Callable[[Term], tuple[str, str]]] = {
    "typable-iff-leftmost-normalizes": _prop_typable_iff_normalizing,
    "inference-replay-checks": _prop_inference_replay_checks,
    "affine-decision-matches-term-class": _prop_affine_decision,
    "linear-decision-matches-term-class": _prop_linear_decision,
    "expansion-checks-aci": _prop_expansion_checks(Flavor.ACI),
    "expansion-checks-ac": _prop_expansion_checks(Flavor.AC),
    "expansion-checks-ordered": _prop_expansion_checks(Flavor.A),
    "expansion-context-laws-aci": _prop_expansion_context_laws(Flavor.ACI),
    "expansion-context-laws-ac": _prop_expansion_context_laws(Flavor.AC),
    "expansion-occurrences-aci": _prop_expansion_occurrences(Flavor.ACI),
    "expansion-occurrences-ac": _prop_expansion_occurrences(Flavor.AC),
    "expansion-occurrences-ordered": _prop_expansion_occurrences(Flavor.A),
    "whd-diagram-aci": _prop_whd_diagram(Flavor.ACI),
    "whd-diagram-ac": _prop_whd_diagram(Flavor.AC),
    "beta-diagram-li-aci": _prop_beta_diagram_li(Flavor.ACI),
    "beta-diagram-li-ac": _prop_beta_diagram_li(Flavor.AC),
    "beta-diagram-li-ordered": _prop_beta_diagram_li(Flavor.A),
    "beta-diagram-unrestricted-aci": _prop_beta_diagram_unrestricted(Flavor.ACI),
    "beta-diagram-unrestricted-ac": _prop_beta_diagram_unrestricted(Flavor.AC),
    "substitution-composes-aci": _prop_substitution_composes(Flavor.ACI),
    "substitution-composes-ac": _prop_substitution_composes(Flavor.AC),
    "substitution-composes-ordered": _prop_substitution_composes(Flavor.A),
    "linear-leftmost-steps-bounded": _prop_linear_steps_bounded,
}
"""Registry of executable properties, keyed by what each one claims."""
