"""Staged zigzag-tripling construction and its exact verifiers.

A FamilyScript presents the target set as a finite double-indexed family of
closed intervals: level n holds the intervals I^k_n, deeper levels nest into
shallower ones inside single thirds. The construction starts from the
identity, and per level subdivides every piece to a height of at most 2^-n
and then replaces each scheduled interval's linear graph by a zig-zag of
three segments with triple the slope and the same range.

All verifiers assert exact rational identities; nothing is approximated.
Construction is sequential by stage; scripts, selections and states are
immutable once built, and the verifiers are pure.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Optional

from ._rat import ONE, ZERO, Rational, pow2, rat, rceil
from .intervals import (
    Error,
    Interval,
    IntervalSet,
    complement_within,
    dilate,
    distance,
    ivl,
    normalize,
    thirds,
)
from .pwl import PWL


class ScriptError(Error):
    pass


class LinearityError(Error):
    """Tripling hit a segment on which the function is not linear."""


@dataclass(frozen=True)
class FamilyScript:
    """Finite truncation of a nested interval family, with the slack epsilon."""

    levels: tuple  # tuple of tuples of Interval, index [n][k]
    epsilon: Rational
    ambient: Interval = Interval(ZERO, ONE)

    @staticmethod
    def of(levels, epsilon, ambient=None) -> "FamilyScript":
        lv = tuple(
            tuple(iv if isinstance(iv, Interval) else ivl(*iv) for iv in level)
            for level in levels
        )
        amb = ambient if ambient is not None else Interval(ZERO, ONE)
        if not isinstance(amb, Interval):
            amb = ivl(*amb)
        return FamilyScript(levels=lv, epsilon=rat(epsilon), ambient=amb)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def level_union(self, n: int) -> IntervalSet:
        return normalize(self.levels[n])

    def a_proxy(self) -> IntervalSet:
        """The deepest level's union stands in for the target set itself."""
        return self.level_union(self.depth)


@dataclass(frozen=True)
class Violation:
    condition: int
    level: int
    k: Optional[int]
    message: str

    def __str__(self):
        where = f"level {self.level}" + ("" if self.k is None else f", k={self.k}")
        return f"condition ({self.condition}) violated at {where}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple
    notes: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


class _LevelIndex:
    """Position-sorted view of one level with the lo-array for bisection."""

    __slots__ = ("ordered", "los")

    def __init__(self, level):
        self.ordered = sorted(
            ((iv, k) for k, iv in enumerate(level)), key=lambda t: (t[0].lo, t[0].hi)
        )
        self.los = [iv.lo for iv, _ in self.ordered]

    def find_parent(self, child: Interval):
        """The interval containing child, if any; intervals of one level
        overlap in at most single points, so a positive-length child fits in
        at most one of them."""
        j = bisect.bisect_right(self.los, child.lo) - 1
        for jj in (j, j - 1):
            if 0 <= jj < len(self.ordered):
                iv, k = self.ordered[jj]
                if iv.contains(child):
                    return iv, k
        return None

    def overlapping(self, J: Interval):
        """Members meeting J in more than a point, right to left."""
        i = bisect.bisect_right(self.los, J.hi) - 1
        while i >= 0:
            iv, k = self.ordered[i]
            if iv.hi <= J.lo:
                break
            yield iv, k
            i -= 1


# Sorted level indexes are reused across validation, core selection and the
# verifiers; keyed by script identity (the script object is kept alive in the
# cache entry, so ids cannot be recycled under us).
_INDEX_CACHE: dict = {}


def _level_index(script: FamilyScript, n: int) -> _LevelIndex:
    key = id(script)
    entry = _INDEX_CACHE.get(key)
    if entry is None or entry[0] is not script:
        entry = (script, {})
        if len(_INDEX_CACHE) > 16:
            _INDEX_CACHE.clear()
        _INDEX_CACHE[key] = entry
    per_level = entry[1]
    idx = per_level.get(n)
    if idx is None:
        idx = _LevelIndex(script.levels[n])
        per_level[n] = idx
    return idx


def _condition5_witness(parent: Interval, child: Interval):
    """The third index i with child inside T_i(parent), or None."""
    for i, t in enumerate(thirds(parent)):
        if t.contains(child):
            return i
    return None


def validate_family(script: FamilyScript) -> ValidationReport:
    """Check conditions (2)-(5) exactly; (1) is infinitary and only noted.

    Condition (3) is verified for consecutive level pairs; the remaining
    pairs follow exactly because the level unions nest once the consecutive
    checks pass.
    """
    violations = []
    levels = script.levels
    for n, level in enumerate(levels):
        for k, iv in enumerate(level):
            if iv.lo > iv.hi:
                violations.append(Violation(0, n, k, "malformed interval"))
        # (2) pairwise intersections at most a point
        ordered = _level_index(script, n).ordered
        max_hi = None
        max_k = None
        for iv, k in ordered:
            if max_hi is not None and iv.lo < max_hi:
                violations.append(
                    Violation(2, n, k, f"{iv} overlaps interval k={max_k} in more than a point")
                )
            if max_hi is None or iv.hi > max_hi:
                max_hi, max_k = iv.hi, k
        # (4) nonincreasing lengths in k
        for k in range(len(level) - 1):
            if level[k].length < level[k + 1].length:
                violations.append(
                    Violation(4, n, k + 1, "length exceeds the previous interval's length")
                )
        # (5) containment in a single third of a shorter parent
        if n > 0:
            parents = _level_index(script, n - 1)
            for k, iv in enumerate(level):
                found = parents.find_parent(iv)
                if found is None:
                    violations.append(Violation(5, n, k, "no parent interval contains it"))
                    continue
                parent, _ = found
                i = _condition5_witness(parent, iv)
                if i is None:
                    violations.append(Violation(5, n, k, f"not inside a single third of {parent}"))
                elif not (iv.length * 9 < parent.length):
                    violations.append(
                        Violation(5, n, k, "length not below one ninth of the parent's")
                    )
    # (3) positive distance to the complement of the previous level's union
    for n in range(1, len(levels)):
        un = script.level_union(n)
        comp = complement_within(script.level_union(n - 1), script.ambient)
        d = distance(un, comp)
        if d is not None and d == 0:
            violations.append(
                Violation(3, n, None, "union touches the complement of the previous level")
            )
    notes = (
        "condition (1) is not checkable at a finite stage; "
        "the nesting checks above are its finite shadow",
        "condition (3) for non-consecutive pairs follows from the consecutive "
        "checks by nesting",
    )
    return ValidationReport(violations=tuple(violations), notes=notes)


def shrink(a: IntervalSet, u: IntervalSet, ambient: Interval) -> IntervalSet:
    """An intermediate set V between a and u at positive distance from u's
    complement: dilate a by half its distance to the complement, clip to u."""
    if a.is_empty or u.is_empty:
        raise ScriptError("shrink requires non-empty sets")
    if not u.contains_set(a):
        raise ScriptError("shrink requires the first set inside the second")
    comp = complement_within(u, ambient)
    if comp.is_empty:
        return u
    d = distance(a, comp)
    if d is None or d == 0:
        raise ScriptError("the inner set touches the complement; no margin exists")
    return dilate(a, d / 2).intersection(u)


# ---------------------------------------------------------------------------
# construction internals on raw breakpoint lists (hot paths)
# ---------------------------------------------------------------------------


def _subdivide_list(bps: list, h) -> list:
    out = [bps[0]]
    append = out.append
    x0, y0 = bps[0]
    for i in range(1, len(bps)):
        x1, y1 = bps[i]
        dy = y1 - y0
        ady = -dy if dy < 0 else dy
        if ady > h:
            m = rceil(ady / h)
            dx = (x1 - x0) / m
            dyy = dy / m
            for j in range(1, m):
                append((x0 + j * dx, y0 + j * dyy))
        append((x1, y1))
        x0, y0 = x1, y1
    return out


def _eval_on(bps, xs, x):
    i = bisect.bisect_right(xs, x) - 1
    if i >= len(bps) - 1:
        i = len(bps) - 2
    x0, y0 = bps[i]
    if x == x0:
        return y0
    x1, y1 = bps[i + 1]
    if x == x1:
        return y1
    return y0 + (x - x0) * (y1 - y0) / (x1 - x0)


def _triple_many_list(bps: list, segments) -> list:
    """Replace the graph on each segment by the canonical three-piece zig-zag.

    Segments must be sorted by position with disjoint interiors, and the
    function must be linear on each (collinear interior breakpoints allowed).
    """
    if not segments:
        return bps
    xs = [x for x, _ in bps]
    out = []

    def push(pt):
        if out and out[-1][0] == pt[0]:
            if out[-1][1] != pt[1]:
                raise LinearityError("conflicting values at a shared breakpoint")
            return
        out.append(pt)

    i = 0
    n = len(bps)
    for seg in segments:
        a, b = seg.lo, seg.hi
        if a == b:
            continue
        while i < n and bps[i][0] < a:
            push(bps[i])
            i += 1
        ya = _eval_on(bps, xs, a)
        yb = _eval_on(bps, xs, b)
        da = b - a
        # linearity over [a, b]: interior breakpoints must sit on the chord
        j = i
        while j < n and bps[j][0] < b:
            x, y = bps[j]
            if x > a and (y - ya) * da != (yb - ya) * (x - a):
                raise LinearityError(
                    f"function is not linear on [{a}, {b}] (breakpoint at x={x})"
                )
            j += 1
        push((a, ya))
        push((a + da / 3, yb))
        push((a + 2 * da / 3, ya))
        push((b, yb))
        i = j
        if i < n and bps[i][0] == b:
            i += 1
    while i < n:
        push(bps[i])
        i += 1
    return out


def triple(f: PWL, segment: Interval) -> PWL:
    """Triple a single linear segment of f; endpoints and range are kept."""
    d = f.domain
    if segment.lo < d.lo or segment.hi > d.hi:
        raise ScriptError("segment outside the function's domain")
    return PWL(_triple_many_list(list(f.breakpoints), [segment]))


# ---------------------------------------------------------------------------
# core selection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoreSelection:
    """Cutoffs, third choices and the resulting nested core unions."""

    cutoffs: tuple  # N_n per level
    choices: tuple  # per level: dict k -> chosen third index (k <= N_n)
    parents: tuple  # per level n>=1: dict k -> (parent k at n-1, third index)
    members: tuple  # per level: tuple of member indices k
    cores: tuple  # per level: IntervalSet union of the member intervals

    def member_intervals(self, script: FamilyScript, n: int):
        return [script.levels[n][k] for k in self.members[n]]


def _third_measures(level, a_parts):
    """For each interval of the (position-sorted) level, the measures of
    A-proxy inside its three thirds. One linear sweep per level."""
    out = {}
    j = 0
    m = len(a_parts)
    for iv, k in level:
        lo, hi = iv.lo, iv.hi
        c1 = lo + (hi - lo) / 3
        c2 = lo + 2 * (hi - lo) / 3
        sums = [ZERO, ZERO, ZERO]
        while j < m and a_parts[j].hi <= lo:
            j += 1
        jj = j
        while jj < m and a_parts[jj].lo < hi:
            u = a_parts[jj].lo
            v = a_parts[jj].hi
            if u < lo:
                u = lo
            if v > hi:
                v = hi
            if u < v:
                # split the clipped part across the two third cuts
                if v <= c1:
                    sums[0] += v - u
                elif u >= c2:
                    sums[2] += v - u
                elif u >= c1 and v <= c2:
                    sums[1] += v - u
                else:
                    if u < c1:
                        sums[0] += c1 - u
                        u = c1
                    if v > c2:
                        sums[2] += v - c2
                        v = c2
                    if u < v:
                        sums[1] += v - u
            if a_parts[jj].hi <= hi:
                jj += 1
            else:
                break
        j = jj if jj > j else j
        out[k] = sums
    return out


def select_core(script: FamilyScript) -> CoreSelection:
    """Cutoffs N_n (minimal), measure-maximizing third choices (ties to the
    smallest index), parent witnesses, and the core unions per level."""
    report = validate_family(script)
    if not report.ok:
        raise ScriptError("invalid script: " + "; ".join(str(v) for v in report.violations))
    a_proxy = script.a_proxy()
    a_parts = a_proxy.parts
    eps = script.epsilon

    cutoffs = []
    choices = []
    parents = []
    members = []
    cores = []
    for n, level in enumerate(script.levels):
        bound = pow2(-n - 2) * eps / (3**n)
        tail = ZERO
        cut = 0
        for k in range(len(level) - 1, -1, -1):
            if tail + level[k].length < bound:
                tail += level[k].length
            else:
                cut = k
                break
        cutoffs.append(cut)

        ordered = [(iv, k) for iv, k in _level_index(script, n).ordered if k <= cut]
        measures = _third_measures(ordered, a_parts)
        ch = {}
        for k, sums in measures.items():
            best = 0
            if sums[1] > sums[best]:
                best = 1
            if sums[2] > sums[best]:
                best = 2
            ch[k] = best
        choices.append(ch)

        if n == 0:
            parents.append({})
            mem = sorted(ch.keys())
        else:
            parent_index = _level_index(script, n - 1)
            par = {}
            mem = []
            prev_members = set(members[n - 1])
            for k in sorted(ch.keys()):
                found = parent_index.find_parent(script.levels[n][k])
                if found is None:
                    continue
                p_iv, p_k = found
                i = _condition5_witness(p_iv, script.levels[n][k])
                if i is None:
                    continue
                par[k] = (p_k, i)
                if p_k in prev_members and choices[n - 1].get(p_k) == i:
                    mem.append(k)
            parents.append(par)
        members.append(tuple(mem))
        cores.append(normalize([level[k] for k in mem]))
    return CoreSelection(
        cutoffs=tuple(cutoffs),
        choices=tuple(choices),
        parents=tuple(parents),
        members=tuple(members),
        cores=tuple(cores),
    )


def with_choice(script: FamilyScript, core: CoreSelection, n: int, k: int, b: int) -> CoreSelection:
    """The same selection with one third-choice overridden; the core chain
    below the changed level is rebuilt. Used as a negative control."""
    if b not in (0, 1, 2):
        raise ValueError("third choice must be 0, 1 or 2")
    choices = [dict(c) for c in core.choices]
    if k not in choices[n]:
        raise ScriptError(f"k={k} is beyond the cutoff at level {n}")
    choices[n][k] = b
    members = [list(core.members[m]) for m in range(len(core.members))]
    for m in range(n + 1, len(script.levels)):
        prev = set(members[m - 1])
        mem = []
        for kk in sorted(core.choices[m].keys()):
            if kk not in core.parents[m]:
                continue
            p_k, i = core.parents[m][kk]
            if p_k in prev and choices[m - 1].get(p_k) == i:
                mem.append(kk)
        members[m] = mem
    cores = [normalize([script.levels[m][kk] for kk in members[m]]) for m in range(len(members))]
    return CoreSelection(
        cutoffs=core.cutoffs,
        choices=tuple(choices),
        parents=core.parents,
        members=tuple(tuple(m) for m in members),
        cores=tuple(cores),
    )


# ---------------------------------------------------------------------------
# stage construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZigzagState:
    N: int
    K: int
    f: PWL
    B_levels: tuple  # IntervalSet per level up to N


@dataclass(frozen=True)
class ZigzagRun:
    script: FamilyScript
    core: CoreSelection
    K: int
    states: tuple  # ZigzagState per stage 0..stages

    @property
    def stages(self) -> int:
        return len(self.states) - 1

    def stage(self, n: int) -> ZigzagState:
        return self.states[n]


def build_run(script: FamilyScript, core: CoreSelection, stages: int, K: int) -> ZigzagRun:
    """Build f_0 .. f_stages in one forward pass, snapshotting every stage.

    Stage n first subdivides every piece to height at most 2^-n, then triples
    the level-n intervals longer than 2^-K. Within a level the intervals have
    disjoint interiors, so position order and index order give the same
    function; across levels smaller n goes first.
    """
    amb = script.ambient
    bps = [(amb.lo, amb.lo), (amb.hi, amb.hi)]
    min_len = pow2(-K)
    states = []
    for n in range(stages + 1):
        bps = _subdivide_list(bps, pow2(-n))
        if n < len(script.levels):
            segs = [iv for iv in script.levels[n] if iv.length > min_len]
            segs.sort(key=lambda iv: iv.lo)
            bps = _triple_many_list(bps, segs)
        f = PWL.__new__(PWL)
        f.breakpoints = tuple(bps)
        f._xs = None
        b_levels = tuple(core.cores[m] for m in range(min(n + 1, len(core.cores))))
        states.append(ZigzagState(N=n, K=K, f=f, B_levels=b_levels))
    return ZigzagRun(script=script, core=core, K=K, states=tuple(states))


def build_stage(script: FamilyScript, core: CoreSelection, N: int, K: int) -> ZigzagState:
    return build_run(script, core, N, K).states[N]


# ---------------------------------------------------------------------------
# verifiers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LevelBounds:
    level: int
    core_measure: Rational
    upper_bound: Rational
    core_inter_proxy: Rational
    lower_required_strong: Rational
    lower_required_weak: Rational
    upper_ok: bool
    lower_ok_strong: bool
    lower_ok_weak: bool


@dataclass(frozen=True)
class MeasureBoundsReport:
    proxy_measure: Rational
    epsilon: Rational
    levels: tuple

    @property
    def ok(self) -> bool:
        return all(lv.upper_ok and lv.lower_ok_strong for lv in self.levels)

    @property
    def ok_weak(self) -> bool:
        return all(lv.upper_ok and lv.lower_ok_weak for lv in self.levels)

    def first_failure(self) -> Optional[LevelBounds]:
        for lv in self.levels:
            if not (lv.upper_ok and lv.lower_ok_strong):
                return lv
        return None


def verify_measure_bounds(core: CoreSelection, script: FamilyScript) -> MeasureBoundsReport:
    """Exact per-level sandwich for the core unions.

    Upper: measure(core_n) <= 3^-n. Lower (strengthened form): 3^n * the
    measure of core_n inside the deepest-level proxy is at least
    measure(proxy) - (1 - 2^-(n+1)) * epsilon, which implies the plain
    measure(proxy) - epsilon bound.
    """
    a_proxy = script.a_proxy()
    lam = a_proxy.measure()
    eps = script.epsilon
    rows = []
    for n, core_set in enumerate(core.cores):
        cm = core_set.measure()
        ub = ONE / (3**n)
        inter = core_set.intersection(a_proxy).measure()
        strong = lam - (ONE - pow2(-n - 1)) * eps
        weak = lam - eps
        got = (3**n) * inter
        rows.append(
            LevelBounds(
                level=n,
                core_measure=cm,
                upper_bound=ub,
                core_inter_proxy=inter,
                lower_required_strong=strong,
                lower_required_weak=weak,
                upper_ok=cm <= ub,
                lower_ok_strong=got >= strong,
                lower_ok_weak=got >= weak,
            )
        )
    return MeasureBoundsReport(proxy_measure=lam, epsilon=eps, levels=tuple(rows))


@dataclass(frozen=True)
class WellLocatedReport:
    well_located: bool
    containment_depth: Optional[int]
    tripling_depth: Optional[int]
    failure: Optional[tuple]  # (n, k) of the interval violating all alternatives

    def __bool__(self):
        return self.well_located


def classify_well_located(J: Interval, script: FamilyScript) -> WellLocatedReport:
    """Check the three alternatives against every script interval.

    containment_depth is the greatest level whose interval contains J;
    tripling_depth counts the levels where J sits inside a single third of
    some interval, which is exactly the slope exponent the image identity
    uses.
    """
    containment = None
    tripling = 0
    for n in range(len(script.levels)):
        index = _level_index(script, n)
        in_third_here = False
        for iv, k in index.overlapping(J):
            overlap_lo = iv.lo if iv.lo > J.lo else J.lo
            overlap_hi = iv.hi if iv.hi < J.hi else J.hi
            if overlap_hi <= overlap_lo:
                continue  # alternative 1: intersection is at most a point
            if J.contains(iv):
                if iv.contains(J):
                    containment = n  # J equals the script interval
                continue  # alternative 2
            if iv.contains(J):
                containment = n
                if _condition5_witness(iv, J) is not None:
                    in_third_here = True  # alternative 3
                    continue
                return WellLocatedReport(False, None, None, (n, k))
            return WellLocatedReport(False, None, None, (n, k))
        if in_third_here:
            tripling += 1
    return WellLocatedReport(True, containment, tripling, None)


def peers(J0: Interval, J1: Interval, script: FamilyScript) -> bool:
    """Whenever both intervals are strict subsets of a script interval, they
    must share one of its thirds."""
    for n in range(len(script.levels)):
        found = _level_index(script, n).find_parent(J0)
        if found is None:
            continue
        iv, _ = found
        if iv.contains(J1) and J0 != iv and J1 != iv:
            if not any(t.contains(J0) and t.contains(J1) for t in thirds(iv)):
                return False
    return True


@dataclass(frozen=True)
class ImageIdentityReport:
    J: Interval
    exponent: int
    expected: Rational
    measures: tuple  # (stage, measure) for stages >= exponent
    identity_ok: bool
    stable_ok: bool

    @property
    def ok(self):
        return self.identity_ok and self.stable_ok


def verify_image_identity(run: ZigzagRun, J: Interval, n: Optional[int] = None) -> ImageIdentityReport:
    """Exact image identity and stage stability for a well-located interval.

    The slope exponent is the tripling depth (number of levels whose third
    contains J); for a script interval at level n both notions agree and the
    image measure is 3^n times its length from stage n on.
    """
    wl = classify_well_located(J, run.script)
    if not wl.well_located:
        raise ScriptError(f"{J} is not well-located; cannot apply the image identity")
    exponent = wl.tripling_depth if n is None else n
    if n is not None and wl.tripling_depth != n:
        raise ScriptError(
            f"declared depth {n} differs from the computed tripling depth {wl.tripling_depth}"
        )
    expected = (3**exponent) * J.length
    measures = []
    images = []
    for state in run.states:
        if state.N < exponent:
            continue
        env = state.f.envelope(J)
        images.append(env)
        measures.append((state.N, env.length))
    identity_ok = all(m == expected for _, m in measures)
    stable_ok = all(env == images[0] for env in images[1:])
    return ImageIdentityReport(
        J=J,
        exponent=exponent,
        expected=expected,
        measures=tuple(measures),
        identity_ok=identity_ok,
        stable_ok=stable_ok,
    )


@dataclass(frozen=True)
class CoreImageReport:
    levels: tuple  # per level: (identity_ok, overlaps_ok, peers_ok, stage_identity_ok)

    @property
    def ok(self):
        return all(all(flags) for flags in self.levels)


def verify_core_images(run: ZigzagRun, stage: Optional[int] = None) -> CoreImageReport:
    """For every core level: each member's image measure equals 3^n times its
    length, the members are pairwise peers, the member images overlap in at
    most single points, and the whole level's image measure is 3^n times the
    level's measure."""
    state = run.states[stage if stage is not None else run.stages]
    f = state.f
    script = run.script
    rows = []
    for nlev, mem in enumerate(run.core.members):
        if nlev > state.N:
            break
        ivs = [script.levels[nlev][k] for k in mem]
        expected_factor = 3**nlev
        envs = []
        identity_ok = True
        for iv in ivs:
            env = f.envelope(iv)
            envs.append(env)
            if env.length != expected_factor * iv.length:
                identity_ok = False
        envs_sorted = sorted(envs)
        overlaps_ok = all(
            envs_sorted[i].hi <= envs_sorted[i + 1].lo for i in range(len(envs_sorted) - 1)
        )
        peers_ok = _members_pairwise_peers(script, nlev, ivs)
        core_set = run.core.cores[nlev]
        stage_ok = f.image(core_set).measure() == expected_factor * core_set.measure()
        rows.append((identity_ok, overlaps_ok, peers_ok, stage_ok))
    return CoreImageReport(levels=tuple(rows))


def _members_pairwise_peers(script: FamilyScript, nlev: int, ivs) -> bool:
    """All members pairwise peers, checked by one sweep per level: any script
    interval strictly containing at least two members must hold all of its
    members inside one third."""
    if len(ivs) < 2:
        return True
    members = sorted(ivs)
    mlos = [iv.lo for iv in members]
    for level in script.levels:
        for iv in level:
            i = bisect.bisect_left(mlos, iv.lo)
            inside = []
            while i < len(members) and members[i].lo <= iv.hi:
                if iv.contains(members[i]) and members[i] != iv:
                    inside.append(members[i])
                i += 1
            if len(inside) >= 2:
                span = Interval(inside[0].lo, max(m.hi for m in inside))
                if _condition5_witness(iv, span) is None:
                    return False
    return True


@dataclass(frozen=True)
class LocalityReport:
    status: str  # "outside" | "in_proxy" | "untouched"
    x: Rational
    N: Optional[int]
    window: Optional[tuple]  # (a, b) open neighborhood
    piece_count: Optional[int]
    slope_range: Optional[tuple]  # (min |slope|, max |slope|) on the window
    stable_ok: Optional[bool]


def verify_locality(script: FamilyScript, x, run: Optional[ZigzagRun] = None) -> LocalityReport:
    """For x outside some level union: a rational neighborhood no deeper
    level meets, so the built function is finitely piecewise linear there."""
    x = rat(x)
    first_out = None
    for n in range(len(script.levels)):
        if not script.level_union(n).contains_point(x):
            first_out = n
            break
    if first_out is None:
        return LocalityReport("in_proxy", x, None, None, None, None, None)
    un = script.level_union(first_out)
    if un.is_empty:
        r = ONE
    else:
        r = distance(IntervalSet((Interval(x, x),)), un)
    a, b = x - r, x + r
    big_n = first_out - 1
    status = "untouched" if big_n < 0 else "outside"
    piece_count = None
    slope_range = None
    stable_ok = None
    if run is not None:
        dom = run.states[0].f.domain
        lo = a if a > dom.lo else dom.lo
        hi = b if b < dom.hi else dom.hi
        ref_stage = max(big_n, 0)
        if ref_stage <= run.stages and lo < hi:
            ref = run.states[ref_stage].f.restrict(lo, hi)
            slopes = [s if s >= 0 else -s for s in ref.slopes()]
            distinct = 1
            prev = None
            for s in ref.slopes():
                if prev is not None and s != prev:
                    distinct += 1
                prev = s
            piece_count = distinct
            slope_range = (min(slopes), max(slopes))
            stable_ok = True
            for state in run.states[ref_stage + 1 :]:
                if not state.f.restrict(lo, hi).agrees_with(ref):
                    stable_ok = False
                    break
    return LocalityReport(status, x, big_n, (a, b), piece_count, slope_range, stable_ok)
