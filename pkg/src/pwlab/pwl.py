"""Algebra of continuous piecewise-linear functions with exact rational data.

A PWL is given by its breakpoints; the function is the linear interpolation
between consecutive breakpoints. Collinear breakpoints are allowed and
preserved: several constructions insert break points that do not change the
function but matter for later stages, so no canonicalization ever happens
implicitly. Values are immutable and operations pure.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from ._rat import ONE, ZERO, Rational, rat, rceil
from .intervals import EMPTY, Error, Interval, IntervalSet, normalize


class DomainError(Error):
    pass


class MonotoneError(Error):
    pass


class PWL:
    """Continuous piecewise-linear function on a closed rational interval."""

    __slots__ = ("breakpoints", "_xs")

    def __init__(self, breakpoints: Sequence):
        pts = tuple((rat(x), rat(y)) for x, y in breakpoints)
        if len(pts) < 2:
            raise ValueError("a PWL needs at least two breakpoints")
        for (x0, _), (x1, _) in zip(pts, pts[1:]):
            if x0 >= x1:
                raise ValueError("breakpoint x-coordinates must increase strictly")
        self.breakpoints = pts
        self._xs = None

    @staticmethod
    def identity(lo=0, hi=1) -> "PWL":
        lo, hi = rat(lo), rat(hi)
        return PWL([(lo, lo), (hi, hi)])

    @property
    def xs(self):
        if self._xs is None:
            self._xs = [x for x, _ in self.breakpoints]
        return self._xs

    @property
    def domain(self) -> Interval:
        return Interval(self.breakpoints[0][0], self.breakpoints[-1][0])

    def __eq__(self, other):
        return isinstance(other, PWL) and self.breakpoints == other.breakpoints

    def __hash__(self):
        return hash(self.breakpoints)

    def __repr__(self):
        n = len(self.breakpoints)
        return f"PWL({n} breakpoints on {self.domain})"

    def pieces(self):
        bps = self.breakpoints
        for i in range(len(bps) - 1):
            yield bps[i], bps[i + 1]

    def value_at(self, x) -> Rational:
        x = rat(x)
        a, b = self.domain
        if x < a or x > b:
            raise DomainError(f"{x} outside domain [{a}, {b}]")
        i = bisect.bisect_right(self.xs, x) - 1
        if i >= len(self.breakpoints) - 1:
            i = len(self.breakpoints) - 2
        (x0, y0), (x1, y1) = self.breakpoints[i], self.breakpoints[i + 1]
        if x == x0:
            return y0
        if x == x1:
            return y1
        return y0 + (x - x0) * (y1 - y0) / (x1 - x0)

    def __call__(self, x) -> Rational:
        return self.value_at(x)

    def envelope(self, part: Interval) -> Interval:
        """Exact [min, max] of the function over a sub-interval of the domain."""
        a, b = part
        ya, yb = self.value_at(a), self.value_at(b)
        lo, hi = (ya, yb) if ya <= yb else (yb, ya)
        i = bisect.bisect_right(self.xs, a)
        j = bisect.bisect_left(self.xs, b)
        for k in range(i, j):
            y = self.breakpoints[k][1]
            if y < lo:
                lo = y
            elif y > hi:
                hi = y
        return Interval(lo, hi)

    def image(self, s: IntervalSet) -> IntervalSet:
        if not s.is_empty:
            d = self.domain
            if s.parts[0].lo < d.lo or s.parts[-1].hi > d.hi:
                raise DomainError("set not contained in the function's domain")
        return normalize([self.envelope(p) for p in s.parts])

    def preimage(self, s: IntervalSet) -> IntervalSet:
        if s.is_empty:
            return EMPTY
        out = []
        slos = [p.lo for p in s.parts]
        for (x0, y0), (x1, y1) in self.pieces():
            ylo, yhi = (y0, y1) if y0 <= y1 else (y1, y0)
            j = bisect.bisect_right(slos, ylo) - 1
            if j < 0:
                j = 0
            while j < len(s.parts) and s.parts[j].lo <= yhi:
                c = s.parts[j].lo if s.parts[j].lo > ylo else ylo
                d = s.parts[j].hi if s.parts[j].hi < yhi else yhi
                if c <= d:
                    if y0 == y1:
                        out.append(Interval(x0, x1))
                    else:
                        w = (x1 - x0) / (y1 - y0)
                        xa = x0 + (c - y0) * w
                        xb = x0 + (d - y0) * w
                        out.append(Interval(xa, xb) if xa <= xb else Interval(xb, xa))
                j += 1
        return normalize(out)

    def variation(self, upto=None) -> Rational:
        """Cumulative variation from the left end of the domain up to 'upto'."""
        if upto is None:
            upto = self.domain.hi
        upto = rat(upto)
        a, b = self.domain
        if upto < a or upto > b:
            raise DomainError(f"{upto} outside domain [{a}, {b}]")
        total = ZERO
        for (x0, y0), (x1, y1) in self.pieces():
            if x1 <= upto:
                total += abs(y1 - y0)
            else:
                if x0 < upto:
                    total += abs(self.value_at(upto) - y0)
                break
        return total

    def sup_distance(self, other: "PWL") -> Rational:
        """Exact max of |self - other|; attained on the merged breakpoint grid."""
        if self.domain != other.domain:
            raise DomainError("sup_distance requires identical domains")
        fb, gb = self.breakpoints, other.breakpoints
        best = ZERO
        a = b = 0
        while a < len(fb) or b < len(gb):
            if b >= len(gb):
                x = fb[a][0]
            elif a >= len(fb):
                x = gb[b][0]
            else:
                x = fb[a][0] if fb[a][0] <= gb[b][0] else gb[b][0]
            if a < len(fb) and fb[a][0] == x:
                yf = fb[a][1]
                a += 1
            else:
                (x0, y0), (x1, y1) = fb[a - 1], fb[a]
                yf = y0 + (x - x0) * (y1 - y0) / (x1 - x0)
            if b < len(gb) and gb[b][0] == x:
                yg = gb[b][1]
                b += 1
            else:
                (x0, y0), (x1, y1) = gb[b - 1], gb[b]
                yg = y0 + (x - x0) * (y1 - y0) / (x1 - x0)
            d = yf - yg
            if d < 0:
                d = -d
            if d > best:
                best = d
        return best

    def agrees_with(self, other: "PWL") -> bool:
        return self.domain == other.domain and self.sup_distance(other) == 0

    def subdivide_by_height(self, h) -> "PWL":
        """Insert equally spaced breakpoints so that every piece rises or falls
        by at most h; the function itself is unchanged."""
        h = rat(h)
        if h <= 0:
            raise ValueError("height bound must be positive")
        out = [self.breakpoints[0]]
        for (x0, y0), (x1, y1) in self.pieces():
            dy = y1 - y0
            ady = -dy if dy < 0 else dy
            if ady > h:
                m = rceil(ady / h)  # minimal piece count
                dx = (x1 - x0) / m
                dyy = dy / m
                for j in range(1, m):
                    out.append((x0 + j * dx, y0 + j * dyy))
            out.append((x1, y1))
        return PWL(out)

    def restrict(self, a, b) -> "PWL":
        """The same function on the sub-domain [a, b]."""
        a, b = rat(a), rat(b)
        if a >= b:
            raise DomainError("restrict needs a < b")
        d = self.domain
        if a < d.lo or b > d.hi:
            raise DomainError("restriction exceeds the domain")
        out = [(a, self.value_at(a))]
        i = bisect.bisect_right(self.xs, a)
        j = bisect.bisect_left(self.xs, b)
        out.extend(self.breakpoints[i:j])
        out.append((b, self.value_at(b)))
        return PWL(out)

    @property
    def is_nondecreasing(self) -> bool:
        return all(y1 >= y0 for (_, y0), (_, y1) in self.pieces())

    def slopes(self):
        for (x0, y0), (x1, y1) in self.pieces():
            yield (y1 - y0) / (x1 - x0)

    def max_abs_slope(self) -> Rational:
        best = ZERO
        for s in self.slopes():
            if s < 0:
                s = -s
            if s > best:
                best = s
        return best


class TwoLinear(NamedTuple):
    holds: bool
    witness: Optional[Rational]


def check_2L(f: PWL, a, b) -> TwoLinear:
    """Whether f on [a, b] splits into two linear halves at some x.

    Collinear breakpoints do not count as slope changes. The witness is the
    unique interior slope-change point, or a when the restriction is linear.
    """
    a, b = rat(a), rat(b)
    if a >= b:
        raise DomainError("check_2L needs a < b")
    g = f.restrict(a, b)
    changes = []
    prev = None
    for (x0, y0), (x1, y1) in g.pieces():
        s = (y1 - y0) / (x1 - x0)
        if prev is not None and s != prev:
            changes.append(x0)
            if len(changes) > 1:
                return TwoLinear(False, None)
        prev = s
    return TwoLinear(True, changes[0] if changes else a)


def check_bilipschitz(f: PWL, a, b, L) -> bool:
    """Injective on [a, b] with every slope magnitude in [1/L, L].

    For monotone piecewise-linear functions this is exactly the two-sided
    bound d(x,y) <= L*d(f(x),f(y)) <= L^2*d(x,y).
    """
    a, b, L = rat(a), rat(b), rat(L)
    if a >= b:
        raise DomainError("check_bilipschitz needs a < b")
    if L < 1:
        raise ValueError("L must be at least 1")
    g = f.restrict(a, b)
    sign = None
    inv = ONE / L
    for s in g.slopes():
        mag = -s if s < 0 else s
        if mag < inv or mag > L:
            return False
        this = s > 0
        if sign is None:
            sign = this
        elif sign != this:
            return False
    return True


def open_image(f: PWL, u: IntervalSet) -> IntervalSet:
    """Per-part open envelopes (inf f(I), sup f(I)); union normalized.

    The result is contained in f[U] and has exactly the same measure; the
    difference consists of at most finitely many endpoint values.
    """
    if not u.is_empty:
        d = f.domain
        if u.parts[0].lo < d.lo or u.parts[-1].hi > d.hi:
            raise DomainError("set not contained in the function's domain")
    envs = [f.envelope(p) for p in u.parts]
    return normalize([e for e in envs if e.lo < e.hi])


def measure_from_cdf(f: PWL, b: IntervalSet) -> Rational:
    """The measure assigned to b by the distribution whose cdf is f."""
    if not f.is_nondecreasing:
        raise MonotoneError("measure_from_cdf requires a nondecreasing function")
    return f.image(b).measure()


@dataclass(frozen=True)
class ACWitness:
    """Absolute-continuity failure data: for each delta, a set of measure
    below delta whose image measure exceeds epsilon."""

    epsilon: Rational
    pairs: tuple  # of (delta, IntervalSet)
    not_found: tuple  # deltas for which the search failed

    def verify(self, f: PWL) -> bool:
        for delta, a_delta in self.pairs:
            if not (a_delta.measure() < delta and f.image(a_delta).measure() > self.epsilon):
                return False
        return True


def find_ac_failure_witness(f: PWL, epsilon, deltas) -> ACWitness:
    """Greedy search (steepest pieces first, leftmost on ties) for witnesses.

    Image measure per unit of length equals the slope, so taking pieces by
    descending slope magnitude is the optimal finite strategy.
    """
    epsilon = rat(epsilon)
    deltas = [rat(d) for d in deltas]
    if any(d <= 0 for d in deltas):
        raise ValueError("deltas must be positive")
    ranked = []
    for (x0, y0), (x1, y1) in f.pieces():
        s = (y1 - y0) / (x1 - x0)
        if s < 0:
            s = -s
        if s > 0:
            ranked.append((s, x0, x1))
    ranked.sort(key=lambda t: (-t[0], t[1]))

    pairs = []
    missing = []
    for delta in deltas:
        sel = []
        total = ZERO
        img = ZERO
        last_slope = None
        for s, x0, x1 in ranked:
            if img > epsilon:
                break
            room = delta - total
            if room <= 0:
                break
            ln = x1 - x0
            take = ln if ln <= room else room
            sel.append(Interval(x0, x0 + take))
            total += take
            last_slope = s
            img = f.image(normalize(sel)).measure()
        if img <= epsilon or not sel:
            missing.append(delta)
            continue
        if total >= delta:
            # shrink the last (shallowest) selected piece to restore strictness;
            # removing eta of length can cost at most eta*slope of image
            last = sel[-1]
            eta = (img - epsilon) / (2 * last_slope)
            if eta >= last.length:
                sel.pop()
            else:
                sel[-1] = Interval(last.lo, last.hi - eta)
            witness = normalize(sel)
            assert witness.measure() < delta
            assert f.image(witness).measure() > epsilon
        else:
            witness = normalize(sel)
        pairs.append((delta, witness))
    return ACWitness(epsilon=epsilon, pairs=tuple(pairs), not_found=tuple(missing))
