"""Type languages and the algebra connecting them.

Four type languages share a variable constructor: simple types (->), linear
types (-o), ordered types (-o_l / -o_r), and intersection types, whose arrows
carry a nonempty list of domain members. One data shape stores all
intersection flavors; flavor semantics (set / multiset / sequence) live in
`normalize` and the equality helpers.

Environments map identifiers to nonempty intersection-member lists. Expansion
contexts come in two shapes: a set context maps owners to {fresh var: type}
groups; a list context keeps owners and their groups in a fixed order.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field


@dataclass(frozen=True)
class TVar:
    name: str


@dataclass(frozen=True)
class Arrow:
    dom: "SimpleType"
    cod: "SimpleType"


@dataclass(frozen=True)
class Lolli:
    dom: "LinearType"
    cod: "LinearType"


@dataclass(frozen=True)
class LolliL:
    dom: "OrderedType"
    cod: "OrderedType"


@dataclass(frozen=True)
class LolliR:
    dom: "OrderedType"
    cod: "OrderedType"


@dataclass(frozen=True)
class InterArrow:
    doms: tuple["InterType", ...]
    cod: "InterType"

    def __post_init__(self):
        if not self.doms:
            raise ValueError("arrow domain needs at least one member")


SimpleType = TVar | Arrow
LinearType = TVar | Lolli
OrderedType = TVar | LolliL | LolliR
InterType = TVar | InterArrow
Type = SimpleType | LinearType | OrderedType | InterType


class Flavor(enum.Enum):
    ACI = "aci"
    AC = "ac"
    A = "a"


def type_key(t: InterType):
    """Structural sort key: variables by name, arrows after variables."""
    match t:
        case TVar(n):
            return (0, n)
        case InterArrow(doms, cod):
            return (1, tuple(type_key(d) for d in doms), type_key(cod))
    raise TypeError(t)


def normalize(t: InterType, flavor: Flavor) -> InterType:
    """Canonical form per flavor: ACI sorts and dedups each domain list,
    AC sorts, A leaves lists untouched."""
    match t:
        case TVar():
            return t
        case InterArrow(doms, cod):
            members = [normalize(d, flavor) for d in doms]
            if flavor is Flavor.ACI:
                members = sorted(set(members), key=type_key)
            elif flavor is Flavor.AC:
                members = sorted(members, key=type_key)
            return InterArrow(tuple(members), normalize(cod, flavor))
    raise TypeError(t)


def inter_eq(a: InterType, b: InterType, flavor: Flavor) -> bool:
    return normalize(a, flavor) == normalize(b, flavor)


def inter_list_eq(xs, ys, flavor: Flavor) -> bool:
    """Equality of intersection-member lists under a flavor: sequences for A,
    multisets for AC, sets for ACI."""
    xs = [normalize(x, flavor) for x in xs]
    ys = [normalize(y, flavor) for y in ys]
    if flavor is Flavor.A:
        return xs == ys
    if flavor is Flavor.AC:
        return sorted(xs, key=type_key) == sorted(ys, key=type_key)
    return set(xs) == set(ys)


# ---- environments ----

TypeEnv = dict[str, tuple[InterType, ...]]


def env_meet(*envs: TypeEnv) -> TypeEnv:
    """Pointwise meet: concatenate intersection lists, left argument first."""
    out: TypeEnv = {}
    for env in envs:
        for x, members in env.items():
            out[x] = out.get(x, ()) + tuple(members)
    return out


def env_eq(a: TypeEnv, b: TypeEnv, flavor: Flavor) -> bool:
    if a.keys() != b.keys():
        return False
    return all(inter_list_eq(a[x], b[x], flavor) for x in a)


# ---- translation into the target languages ----


class Target(enum.Enum):
    SIMPLE = "simple"
    LINEAR = "linear"
    ORDERED = "ordered"


_ARROW_OF = {
    Target.SIMPLE: Arrow,
    Target.LINEAR: Lolli,
    Target.ORDERED: LolliR,
}


def translate(t: InterType, target: Target) -> Type:
    """Curry each domain member into its own arrow of the target language."""
    match t:
        case TVar():
            return t
        case InterArrow(doms, cod):
            arrow = _ARROW_OF[target]
            out = translate(cod, target)
            for d in reversed(doms):
                out = arrow(translate(d, target), out)
            return out
    raise TypeError(t)


# ---- bases ----


@dataclass(frozen=True)
class Basis:
    """Ordered assumption list; variables must be pairwise distinct."""

    entries: tuple[tuple[str, Type], ...] = ()

    def __post_init__(self):
        names = [x for x, _ in self.entries]
        if len(set(names)) != len(names):
            raise ValueError(f"repeated basis variable in {names}")

    def vars(self) -> tuple[str, ...]:
        return tuple(x for x, _ in self.entries)

    def type_of(self, x: str) -> Type:
        for v, ty in self.entries:
            if v == x:
                return ty
        raise KeyError(x)

    def __len__(self):
        return len(self.entries)


# ---- expansion contexts ----


class CollisionError(ValueError):
    """Two context operands share an expansion-variable name."""


@dataclass
class SetExpCtx:
    """Owners in insertion order; each owner holds fresh-variable bindings in
    insertion order. Insertion order is bookkeeping only: set contexts compare
    and combine as sets."""

    groups: dict[str, dict[str, InterType]] = field(default_factory=dict)

    def owners(self) -> list[str]:
        return list(self.groups)

    def binding_vars(self) -> list[str]:
        return [y for group in self.groups.values() for y in group]

    def copy(self) -> "SetExpCtx":
        return SetExpCtx({x: dict(g) for x, g in self.groups.items()})


@dataclass
class ListExpCtx:
    """Owner groups in a significant order; bindings hold target-language
    (ordered) types."""

    groups: list[tuple[str, list[tuple[str, Type]]]] = field(default_factory=list)

    def owners(self) -> list[str]:
        return [x for x, _ in self.groups]

    def binding_vars(self) -> list[str]:
        return [y for _, g in self.groups for y, _ in g]

    def copy(self) -> "ListExpCtx":
        return ListExpCtx([(x, list(g)) for x, g in self.groups])


ExpansionContext = SetExpCtx | ListExpCtx


def ctx_union(a: SetExpCtx, b: SetExpCtx) -> SetExpCtx:
    """Join set contexts; owner groups merge, expansion variables must differ."""
    shared = set(a.binding_vars()) & set(b.binding_vars())
    if shared:
        raise CollisionError(f"shared expansion variables: {sorted(shared)}")
    out = a.copy()
    for x, group in b.groups.items():
        tgt = out.groups.setdefault(x, {})
        tgt.update(group)
    return out


def ctx_append(a: ListExpCtx, b: ListExpCtx) -> ListExpCtx:
    """Join list contexts left to right. A group whose owner already appears
    splices immediately after that owner's existing bindings; a new owner
    appends at the end."""
    shared = set(a.binding_vars()) & set(b.binding_vars())
    if shared:
        raise CollisionError(f"shared expansion variables: {sorted(shared)}")
    out = a.copy()
    for x, group in b.groups:
        for ox, og in out.groups:
            if ox == x:
                og.extend(group)
                break
        else:
            out.groups.append((x, list(group)))
    return out


def ctx_leq(a: SetExpCtx, b: SetExpCtx) -> bool:
    """Pointwise containment of owner groups, bindings compared by
    (variable, type) pairs."""
    for x, group in a.groups.items():
        other = b.groups.get(x)
        if other is None:
            return False
        for y, ty in group.items():
            if y not in other or other[y] != ty:
                return False
    return True


def env_to_set_ctx(env: TypeEnv, supply) -> SetExpCtx:
    """One fresh variable per intersection member, indexed per owner."""
    ctx = SetExpCtx()
    for x, members in env.items():
        group: dict[str, InterType] = {}
        for ty in members:
            group[supply.fresh(x)] = ty
        ctx.groups[x] = group
    return ctx


def set_ctx_to_env(ctx: SetExpCtx) -> TypeEnv:
    """Forget the fresh names; inverse of env_to_set_ctx up to renaming."""
    return {x: tuple(group.values()) for x, group in ctx.groups.items() if group}


def ctx_to_basis(ctx: ExpansionContext, target: Target) -> Basis:
    """Flatten a context into an assumption list. Set contexts translate each
    binding's type; list contexts already hold target types and keep their
    exact order."""
    entries: list[tuple[str, Type]] = []
    if isinstance(ctx, SetExpCtx):
        for x, group in ctx.groups.items():
            for y, ty in group.items():
                entries.append((y, translate(ty, target)))
    else:
        for _x, group in ctx.groups:
            entries.extend(group)
    return Basis(tuple(entries))


def set_ctx_eq(a: SetExpCtx, b: SetExpCtx, flavor: Flavor) -> bool:
    """Literal equality as sets: same owners, same named bindings, types equal
    under the flavor."""
    if set(a.groups) != set(b.groups):
        return False
    for x, group in a.groups.items():
        other = b.groups[x]
        if set(group) != set(other):
            return False
        if not all(inter_eq(group[y], other[y], flavor) for y in group):
            return False
    return True


def ctx_match(a: ExpansionContext, b: ExpansionContext, flavor: Flavor):
    """Renamings of a's expansion variables onto b's that respect owners and
    types. Used to compare independently produced contexts."""
    if isinstance(a, ListExpCtx) != isinstance(b, ListExpCtx):
        return
    if isinstance(a, ListExpCtx):
        if a.owners() != b.owners():
            return
        ren: dict[str, str] = {}
        for (_, ga), (_, gb) in zip(a.groups, b.groups):
            if len(ga) != len(gb):
                return
            for (ya, ta), (yb, tb) in zip(ga, gb):
                if ta != tb:
                    return
                ren[ya] = yb
        yield ren
        return
    groups_a = {x: g for x, g in a.groups.items() if g}
    groups_b = {x: g for x, g in b.groups.items() if g}
    if set(groups_a) != set(groups_b):
        return
    per_owner: list[list[dict[str, str]]] = []
    for x, ga in groups_a.items():
        gb = groups_b[x]
        if len(ga) != len(gb):
            return
        items_a = list(ga.items())
        choices: list[dict[str, str]] = []
        for perm in itertools.permutations(gb.items()):
            if all(inter_eq(ta, tb, flavor) for (_, ta), (_, tb) in zip(items_a, perm)):
                choices.append({ya: yb for (ya, _), (yb, _) in zip(items_a, perm)})
        if not choices:
            return
        per_owner.append(choices)
    for combo in itertools.product(*per_owner):
        ren = {}
        for piece in combo:
            ren.update(piece)
        yield ren
