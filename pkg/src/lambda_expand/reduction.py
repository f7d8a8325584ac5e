"""Beta reduction: positioned single steps, strategies, bounded runs."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .terms import Abs, App, Term, Var, canonicalize, substitute

# A redex position is a path from the root: "left" into an application's
# function, "right" into its argument, "under" into an abstraction body.
RedexPosition = tuple[str, ...]


class NotARedexError(ValueError):
    pass


class Strategy(enum.Enum):
    LEFTMOST = "leftmost"
    WEAK_HEAD = "weak-head"


@dataclass(frozen=True)
class TraceStep:
    position: RedexPosition
    kind: str  # "beta"
    result: Term


@dataclass
class ReductionTrace:
    start: Term
    steps: list[TraceStep] = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def final(self) -> Term:
        return self.steps[-1].result if self.steps else self.start


@dataclass
class ReduceResult:
    trace: ReductionTrace
    status: str  # "normal-form" | "weak-head-nf" | "fuel-exhausted"
    term: Term


def subterm_at(t: Term, position: RedexPosition) -> Term:
    for step in position:
        match step, t:
            case "left", App(fun, _):
                t = fun
            case "right", App(_, arg):
                t = arg
            case "under", Abs(_, body):
                t = body
            case _:
                raise NotARedexError(f"path {position} leaves the term")
    return t


def redex_positions(t: Term) -> list[RedexPosition]:
    """All redex positions, leftmost-outermost first."""
    out: list[RedexPosition] = []

    def go(t: Term, path: tuple[str, ...]) -> None:
        match t:
            case App(fun, arg):
                if isinstance(fun, Abs):
                    out.append(path)
                go(fun, path + ("left",))
                go(arg, path + ("right",))
            case Abs(_, body):
                go(body, path + ("under",))

    go(t, ())
    return out


def beta_step(t: Term, position: RedexPosition) -> Term:
    """Contract the redex at `position`; the result is canonicalized."""
    target = subterm_at(t, position)
    if not (isinstance(target, App) and isinstance(target.fun, Abs)):
        raise NotARedexError(f"no redex at {position}")

    def rebuild(t: Term, path: RedexPosition) -> Term:
        if not path:
            red = t
            return substitute(red.fun.body, red.fun.binder, red.arg)
        step, rest = path[0], path[1:]
        match step, t:
            case "left", App(fun, arg):
                return App(rebuild(fun, rest), arg)
            case "right", App(fun, arg):
                return App(fun, rebuild(arg, rest))
            case "under", Abs(b, body):
                return Abs(b, rebuild(body, rest))
        raise NotARedexError(f"path {position} leaves the term")

    return canonicalize(rebuild(t, position))


def weak_head_position(t: Term) -> RedexPosition | None:
    """Position of the head redex of (\\x. M) N N1 ... Nk, if any."""
    path_len = 0
    spine = t
    while isinstance(spine, App) and isinstance(spine.fun, App):
        spine = spine.fun
        path_len += 1
    if isinstance(spine, App) and isinstance(spine.fun, Abs):
        return ("left",) * path_len
    return None


def weak_head_step(t: Term) -> tuple[Term, RedexPosition] | None:
    """One weak-head step; None exactly on weak-head normal forms."""
    pos = weak_head_position(t)
    if pos is None:
        return None
    return beta_step(t, pos), pos


def reduce(t: Term, strategy: Strategy = Strategy.LEFTMOST, fuel: int = 10_000) -> ReduceResult:
    """Run a strategy for at most `fuel` steps. Fuel exhaustion is reported as
    its own status: it is inconclusive, not a verdict on the term."""
    trace = ReductionTrace(start=t)
    current = t
    for _ in range(fuel):
        if strategy is Strategy.LEFTMOST:
            positions = redex_positions(current)
            if not positions:
                return ReduceResult(trace, "normal-form", current)
            pos = positions[0]
        else:
            pos = weak_head_position(current)
            if pos is None:
                return ReduceResult(trace, "weak-head-nf", current)
        current = beta_step(current, pos)
        trace.steps.append(TraceStep(pos, "beta", current))
    # fuel spent; the last step may still have landed on a final form
    if strategy is Strategy.LEFTMOST and not redex_positions(current):
        return ReduceResult(trace, "normal-form", current)
    if strategy is Strategy.WEAK_HEAD and weak_head_position(current) is None:
        return ReduceResult(trace, "weak-head-nf", current)
    return ReduceResult(trace, "fuel-exhausted", current)
