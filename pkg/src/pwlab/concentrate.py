"""Measure concentration for nondecreasing piecewise-linear functions.

The concentrate operator rebuilds a function over the preimage of a target
set B so that a set of measure below delta maps exactly onto B, while moving
the function by less than delta and leaving it untouched outside the
preimage of B. A chain of such steps with summable deltas converges
uniformly; if the targets keep measure bounded away from zero the limit maps
arbitrarily small sets onto fat ones.

The priority simulator runs finitely many cell strategies against the chain;
each strategy protects a moving cell of fixed budget from concentration and
freezes once its cell history has covered the whole interval. Simulation is
inherently sequential (each stage depends on the previous function); the
state snapshots themselves are immutable.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from ._rat import ONE, ZERO, Rational, pow2, pow2_le, rat, rceil
from .intervals import (
    EMPTY,
    Error,
    Interval,
    IntervalSet,
    complement_within,
    interval_set,
    normalize,
)
from .pwl import PWL, MonotoneError


class ConcentrateError(Error):
    pass


class ConfigError(Error):
    pass


@dataclass(frozen=True)
class ConcentrateResult:
    """The rebuilt function and the steep set that covers the target."""

    function: PWL
    steep_set: IntervalSet
    max_slope: Optional[Rational] = None  # tracked during assembly


def concentrate(h: PWL, b: IntervalSet, delta) -> ConcentrateResult:
    """Canonical concentration scheme.

    The target is decomposed into almost-disjoint components on whose
    preimages h is linear (one region per piece of h and component of b).
    Each region is split into the minimal number of equal-height bands not
    exceeding delta; each band gets one steep segment at its left end
    followed by a flat run at the band's top value. The global steep
    fraction is the largest power of two at most min(1/2,
    delta/(2*measure(preimage of b))), which keeps the steep set below
    delta/2 and the coordinate denominators tame.

    Flat pieces of h whose value lies inside b are left alone; the bands of
    the neighboring regions already cover those values.
    """
    delta = rat(delta)
    if delta <= 0:
        raise ConcentrateError("delta must be positive")
    bset = normalize(b.parts)
    if bset.is_empty or bset.is_pure_points:
        return ConcentrateResult(h, EMPTY, h.max_abs_slope())

    bps = h.breakpoints
    y_first, y_last = bps[0][1], bps[-1][1]
    if bset.parts[0].lo < y_first or bset.parts[-1].hi > y_last:
        raise ConcentrateError("target set not contained in the function's range")

    # regions: (p, q, c, d) with h linear increasing from (p, c) to (q, d)
    regions = []
    pre_measure = ZERO
    blos = [p.lo for p in bset.parts]
    max_slope = ZERO
    for (x0, y0), (x1, y1) in zip(bps, bps[1:]):
        if y1 < y0:
            raise MonotoneError("concentrate requires a nondecreasing function")
        s = (y1 - y0) / (x1 - x0)
        if s > max_slope:
            max_slope = s
        j = bisect.bisect_right(blos, y0) - 1
        if j < 0:
            j = 0
        while j < len(bset.parts) and bset.parts[j].lo <= y1:
            c = bset.parts[j].lo if bset.parts[j].lo > y0 else y0
            d = bset.parts[j].hi if bset.parts[j].hi < y1 else y1
            if c <= d:
                if y0 == y1:
                    pre_measure += x1 - x0  # flat piece inside the preimage
                elif c < d:
                    w = (x1 - x0) / (y1 - y0)
                    p = x0 + (c - y0) * w
                    q = x0 + (d - y0) * w
                    regions.append((p, q, c, d))
                    pre_measure += q - p
            j += 1
    if not regions:
        return ConcentrateResult(h, EMPTY, max_slope)

    cap = delta / (2 * pre_measure)
    rho = pow2_le(cap if cap < rat(1, 2) else rat(1, 2))

    regions.sort()
    out = []
    steep = []

    def push(pt):
        if out and out[-1][0] == pt[0]:
            return
        out.append(pt)

    new_max = max_slope
    i = 0
    n = len(bps)
    xs = h.xs
    for p, q, c, d in regions:
        while i < n and bps[i][0] < p:
            push(bps[i])
            i += 1
        span = d - c
        m = rceil(span / delta)  # minimal band count
        w = (q - p) / m
        hgt = span / m
        sw = rho * w
        steep_slope = hgt / sw
        if steep_slope > new_max:
            new_max = steep_slope
        x = p
        y = c
        for _ in range(m):
            push((x, y))
            steep.append(Interval(x, x + sw))
            y = y + hgt
            push((x + sw, y))
            x = x + w
        push((q, d))
        while i < n and bps[i][0] < q:
            i += 1
        if i < n and bps[i][0] == q:
            i += 1
    while i < n:
        push(bps[i])
        i += 1

    g = PWL.__new__(PWL)
    g.breakpoints = tuple(out)
    g._xs = None
    return ConcentrateResult(g, normalize(steep), new_max)


@dataclass(frozen=True)
class ConcentrateReport:
    unchanged_outside: bool
    steep_small: bool
    covers_target: bool
    steep_consistent: bool
    within_delta: bool
    sup_move: Rational

    @property
    def ok(self):
        return (
            self.unchanged_outside
            and self.steep_small
            and self.covers_target
            and self.steep_consistent
            and self.within_delta
        )

    def first_failure(self) -> Optional[str]:
        for name in (
            "unchanged_outside",
            "steep_small",
            "covers_target",
            "steep_consistent",
            "within_delta",
        ):
            if not getattr(self, name):
                return name
        return None


def verify_concentrate(h: PWL, b: IntervalSet, delta, result: ConcentrateResult) -> ConcentrateReport:
    """Exact check of the three concentration postconditions.

    Also recomputes the steep set independently as the positive-slope pieces
    of the rebuilt function mapping into the target, so a tampered steep set
    is caught even when the function itself is intact.
    """
    delta = rat(delta)
    g = result.function
    f_set = result.steep_set

    pre = h.preimage(b)
    outside = complement_within(pre, h.domain)
    unchanged = True
    for part in outside.parts:
        if part.lo < part.hi:
            if not g.restrict(part.lo, part.hi).agrees_with(h.restrict(part.lo, part.hi)):
                unchanged = False
                break

    steep_small = f_set.measure() < delta
    covers = g.image(f_set) == b

    recomputed = []
    for (x0, y0), (x1, y1) in g.pieces():
        if y1 > y0 and b.contains_set(IntervalSet((Interval(y0, y1),))):
            recomputed.append(Interval(x0, x1))
    consistent = normalize(recomputed) == f_set

    sup = h.sup_distance(g)
    return ConcentrateReport(
        unchanged_outside=unchanged,
        steep_small=steep_small,
        covers_target=covers,
        steep_consistent=consistent,
        within_delta=sup < delta,
        sup_move=sup,
    )


# ---------------------------------------------------------------------------
# uniformly convergent chains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainStep:
    index: int
    target: IntervalSet
    delta: Rational
    steep_set: IntervalSet
    cauchy: Rational
    cauchy_ok: bool
    steep_small: bool


@dataclass(frozen=True)
class ChainResult:
    functions: tuple  # f_0 .. f_stages
    steps: tuple  # ChainStep per step

    @property
    def ok(self):
        return all(st.cauchy_ok and st.steep_small for st in self.steps)

    def witness_persistence(self) -> bool:
        """Every later stage still maps each steep set exactly onto its
        target; concentration never moves values at existing breakpoints."""
        for st in self.steps:
            for m in range(st.index + 1, len(self.functions)):
                if self.functions[m].image(st.steep_set) != st.target:
                    return False
        return True

    def failure_pairs(self, epsilon):
        """When every target keeps measure above epsilon, the steep sets are
        the failure data: sets of measure below 2^-n whose images under every
        later stage keep measure above epsilon. Returns None otherwise."""
        epsilon = rat(epsilon)
        if not all(st.target.measure() > epsilon for st in self.steps):
            return None
        return [(st.steep_set, st.target) for st in self.steps]


def build_chain(b_seq: Sequence[IntervalSet], stages: Optional[int] = None) -> ChainResult:
    """f_0 identity, then one concentration per stage with delta 2^-n."""
    if stages is None:
        stages = len(b_seq)
    if stages > len(b_seq):
        raise ConfigError("not enough target sets for the requested stages")
    fs = [PWL.identity()]
    steps = []
    for n in range(stages):
        delta = pow2(-n)
        res = concentrate(fs[-1], b_seq[n], delta)
        cauchy = fs[-1].sup_distance(res.function)
        steps.append(
            ChainStep(
                index=n,
                target=normalize(b_seq[n].parts),
                delta=delta,
                steep_set=res.steep_set,
                cauchy=cauchy,
                cauchy_ok=cauchy < delta,
                steep_small=res.steep_set.measure() < delta,
            )
        )
        fs.append(res.function)
    return ChainResult(functions=tuple(fs), steps=tuple(steps))


# ---------------------------------------------------------------------------
# priority simulator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StrategyState:
    epsilon: Rational
    cell: IntervalSet
    history: IntervalSet
    frozen: bool
    P: Optional[IntervalSet]
    fired: int


@dataclass(frozen=True)
class PriorityState:
    stage: int
    f: PWL
    strategies: tuple
    B: Optional[IntervalSet]  # the set concentrated on in the last step
    domain: Interval
    max_slope: Rational

    @property
    def budgets(self):
        return tuple(s.epsilon for s in self.strategies)


def init_priority(budgets: Sequence, domain: Interval = Interval(ZERO, ONE)) -> PriorityState:
    """Cells start as adjacent leftmost intervals of the budget lengths."""
    eps = [rat(e) for e in budgets]
    if sum(eps, ZERO) >= rat(1, 2):
        raise ConfigError("strategy budgets must sum to less than 1/2")
    if any(e <= 0 for e in eps):
        raise ConfigError("strategy budgets must be positive")
    strategies = []
    offset = domain.lo
    for e in eps:
        cell = interval_set(Interval(offset, offset + e))
        strategies.append(
            StrategyState(epsilon=e, cell=cell, history=cell, frozen=False, P=None, fired=0)
        )
        offset = offset + e
    return PriorityState(
        stage=0,
        f=PWL.identity(domain.lo, domain.hi),
        strategies=tuple(strategies),
        B=None,
        domain=domain,
        max_slope=ONE,
    )


def _take_leftmost(fresh: IntervalSet, amount) -> IntervalSet:
    taken = []
    left = amount
    for part in fresh.parts:
        if left <= 0:
            break
        ln = part.length
        if ln <= left:
            taken.append(part)
            left -= ln
        else:
            taken.append(Interval(part.lo, part.lo + left))
            left = ZERO
    return normalize(taken)


def priority_step(state: PriorityState, next_p: Sequence[Optional[IntervalSet]]) -> PriorityState:
    """One stage: update the active cells in priority order, then concentrate
    on the complement of the active cells with delta 2^-stage.

    A strategy whose class image meets its cell with measure at least half
    the budget keeps the cell. Otherwise the cell is rebuilt from the kept
    intersection plus leftmost fresh intervals restoring the budget; when the
    fresh space cannot restore it, the strategy takes all of it, its history
    covers the whole domain, and it freezes for good.
    """
    s = state.stage
    f = state.f
    strategies = list(state.strategies)
    for e in range(min(s, len(strategies))):
        st = strategies[e]
        p_new = next_p[e] if e < len(next_p) else None
        if p_new is None:
            p_new = st.P
        if p_new is None:
            continue
        if st.P is not None and not st.P.contains_set(p_new):
            raise ConfigError(f"class approximation for strategy {e} is not nested")
        if st.frozen:
            strategies[e] = replace(st, P=p_new)
            continue
        img = f.image(p_new)
        kept = img.intersection(st.cell)
        if kept.measure() >= st.epsilon / 2:
            strategies[e] = replace(st, P=p_new)
            continue
        needed = st.epsilon - kept.measure()
        fresh = complement_within(st.history, state.domain)
        if fresh.measure() >= needed:
            taken = _take_leftmost(fresh, needed)
            strategies[e] = replace(
                st,
                cell=kept.union(taken),
                history=st.history.union(taken),
                P=p_new,
                fired=st.fired + 1,
            )
        else:
            strategies[e] = replace(
                st,
                cell=kept.union(fresh),
                history=interval_set(state.domain),
                frozen=True,
                P=p_new,
                fired=st.fired + 1,
            )
    cells = EMPTY
    for e in range(min(s, len(strategies))):
        cells = cells.union(strategies[e].cell)
    b = complement_within(cells, state.domain)
    if 2 * b.measure() <= state.domain.length:
        raise ConfigError("complement of the cells lost more than half the measure")
    res = concentrate(f, b, pow2(-s))
    new_max = res.max_slope if res.max_slope > state.max_slope else state.max_slope
    return PriorityState(
        stage=s + 1,
        f=res.function,
        strategies=tuple(strategies),
        B=b,
        domain=state.domain,
        max_slope=new_max,
    )


def shrink_to_point_class(state: PriorityState, e: int, point) -> IntervalSet:
    """Next class approximation for a strategy shrinking onto a point.

    The width is a power of two chosen against the current maximal slope and
    the worst possible slope growth of the remaining stages, so the class
    image always meets the cell with measure far below half the budget and
    the final image measure is tiny.
    """
    st = state.strategies[e]
    cap = state.max_slope if state.max_slope > ONE else ONE
    w = pow2_le(st.epsilon / (64 * cap * pow2(state.stage + 9)))
    lo = point - w
    hi = point + w
    if lo < state.domain.lo:
        lo = state.domain.lo
    if hi > state.domain.hi:
        hi = state.domain.hi
    p_new = interval_set(Interval(lo, hi))
    if st.P is not None:
        p_new = p_new.intersection(st.P)
    return p_new


@dataclass(frozen=True)
class StageRecord:
    stage: int
    b_measure: Rational
    piece_count: int
    cell_measures: tuple
    frozen: tuple
    fired: tuple


@dataclass(frozen=True)
class PriorityRunResult:
    final: PriorityState
    records: tuple

    @property
    def b_always_large(self) -> bool:
        return all(2 * r.b_measure > ONE for r in self.records)

    @property
    def all_frozen(self) -> bool:
        return all(s.frozen for s in self.final.strategies)


def run_priority(
    budgets: Sequence,
    points: Sequence,
    stages: int,
    schedules: Optional[Sequence] = None,
    domain: Interval = Interval(ZERO, ONE),
    on_stage=None,
) -> PriorityRunResult:
    """Drive the simulator for a number of stages.

    Classes either follow explicit per-stage interval-set schedules or shrink
    automatically onto the given points. on_stage, when given, is called with
    each post-step state for streaming dumps.
    """
    state = init_priority(budgets, domain)
    points = [rat(p) for p in points]
    records = []
    for s in range(stages):
        next_p = []
        for e in range(len(state.strategies)):
            if schedules is not None and schedules[e] is not None:
                seq = schedules[e]
                next_p.append(seq[s] if s < len(seq) else None)
            else:
                next_p.append(shrink_to_point_class(state, e, points[e]))
        state = priority_step(state, next_p)
        records.append(
            StageRecord(
                stage=s,
                b_measure=state.B.measure(),
                piece_count=len(state.f.breakpoints) - 1,
                cell_measures=tuple(st.cell.measure() for st in state.strategies),
                frozen=tuple(st.frozen for st in state.strategies),
                fired=tuple(st.fired for st in state.strategies),
            )
        )
        if on_stage is not None:
            on_stage(state, records[-1])
    return PriorityRunResult(final=state, records=tuple(records))


@dataclass(frozen=True)
class KurtzImageReport:
    status: str  # "frozen" | "pending"
    value: Optional[Rational]
    piece_count: Optional[int]
    note: str


def verify_kurtz_image(state: PriorityState, e: int) -> KurtzImageReport:
    """Once a strategy froze, the function is final on the preimage of its
    cell, so the image measure of the shrinking class tends to zero."""
    st = state.strategies[e]
    if not st.frozen:
        return KurtzImageReport(
            status="pending",
            value=None,
            piece_count=None,
            note="strategy not frozen; whether it eventually freezes is not "
            "checkable at a finite stage",
        )
    value = state.f.image(st.P).measure() if st.P is not None else ZERO
    pre = state.f.preimage(st.cell)
    count = 0
    xs = state.f.xs
    for part in pre.parts:
        i = bisect.bisect_right(xs, part.lo)
        j = bisect.bisect_left(xs, part.hi)
        count += max(j - i, 0) + 1
    return KurtzImageReport(
        status="frozen",
        value=value,
        piece_count=count,
        note="image measure of the class under the final function",
    )
