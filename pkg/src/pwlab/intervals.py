"""Closed rational intervals and normalized finite unions of them.

Conventions (used throughout the package):

* every set is a finite union of closed intervals with rational endpoints;
* normalization sorts parts, merges overlapping or touching parts, and drops
  zero-length (point) parts unless the whole set consists of points only
  (a "pure point set", which some operations legitimately produce);
* set difference returns the closure of the interior of the difference, so
  removing a set only erases interior overlap. Single-point overlaps carry
  no measure and are deliberately ignored by the algebra.

All values are immutable and all operations pure, so everything here is safe
to share between threads.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional

from ._rat import Rational, RationalLike, ZERO, rat, rat_str


class Error(Exception):
    """Base error for the package."""


class MalformedInterval(Error):
    pass


class EmptySetError(Error):
    pass


class Interval(NamedTuple):
    lo: Rational
    hi: Rational

    @property
    def length(self) -> Rational:
        return self.hi - self.lo

    def contains_point(self, x) -> bool:
        return self.lo <= x <= self.hi

    def contains(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __str__(self) -> str:
        return f"[{rat_str(self.lo)},{rat_str(self.hi)}]"


def ivl(lo: RationalLike, hi: RationalLike) -> Interval:
    """Validated interval constructor; rejects lo > hi."""
    lo, hi = rat(lo), rat(hi)
    if lo > hi:
        raise MalformedInterval(f"interval with lo > hi: {rat_str(lo)} > {rat_str(hi)}")
    return Interval(lo, hi)


def third(iv: Interval, i: int) -> Interval:
    """The i-th closed third of iv; the three thirds tile iv, touching at points."""
    if i not in (0, 1, 2):
        raise ValueError("third index must be 0, 1 or 2")
    a, b = iv
    step = (b - a) / 3
    return Interval(a + i * step, a + (i + 1) * step if i < 2 else b)


def thirds(iv: Interval) -> tuple:
    a, b = iv
    step = (b - a) / 3
    c1, c2 = a + step, a + 2 * step
    return (Interval(a, c1), Interval(c1, c2), Interval(c2, b))


@dataclass(frozen=True)
class IntervalSet:
    """Normalized finite union of closed intervals."""

    parts: tuple

    @staticmethod
    def of(*pairs) -> "IntervalSet":
        return normalize([ivl(lo, hi) for lo, hi in pairs])

    @property
    def is_empty(self) -> bool:
        return not self.parts

    @property
    def is_pure_points(self) -> bool:
        return bool(self.parts) and all(p.lo == p.hi for p in self.parts)

    def measure(self) -> Rational:
        m = ZERO
        for p in self.parts:
            m += p.hi - p.lo
        return m

    def hull(self) -> Interval:
        if not self.parts:
            raise EmptySetError("hull of the empty set")
        return Interval(self.parts[0].lo, self.parts[-1].hi)

    def contains_point(self, x) -> bool:
        i = bisect.bisect_right([p.lo for p in self.parts], x)
        return i > 0 and x <= self.parts[i - 1].hi

    def contains_set(self, other: "IntervalSet") -> bool:
        """Closed containment: every part of other lies inside one part of self."""
        i = 0
        for q in other.parts:
            while i < len(self.parts) and self.parts[i].hi < q.lo:
                i += 1
            if i == len(self.parts) or not self.parts[i].contains(q):
                return False
        return True

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return normalize(list(self.parts) + list(other.parts))

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        i = j = 0
        a, b = self.parts, other.parts
        while i < len(a) and j < len(b):
            lo = a[i].lo if a[i].lo > b[j].lo else b[j].lo
            hi = a[i].hi if a[i].hi < b[j].hi else b[j].hi
            if lo <= hi:
                out.append(Interval(lo, hi))
            if a[i].hi < b[j].hi:
                i += 1
            else:
                j += 1
        return normalize(out)

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        """Closure of the interior of self minus other (closed-set semantics).

        Point parts of self survive only when no part of other covers them.
        """
        out = []
        b = other.parts
        j = 0
        for p in self.parts:
            while j < len(b) and b[j].hi < p.lo:
                j += 1
            if p.lo == p.hi:
                if not (j < len(b) and b[j].lo <= p.lo):
                    out.append(p)
                continue
            cur = p.lo
            k = j
            while k < len(b) and b[k].lo < p.hi:
                if b[k].lo > cur:
                    out.append(Interval(cur, b[k].lo))
                if b[k].hi > cur:
                    cur = b[k].hi
                if cur >= p.hi:
                    break
                k += 1
            if cur < p.hi:
                out.append(Interval(cur, p.hi))
        return normalize(out)

    def __or__(self, other):
        return self.union(other)

    def __and__(self, other):
        return self.intersection(other)

    def __sub__(self, other):
        return self.difference(other)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    def __str__(self) -> str:
        return "[" + ",".join(str(p) for p in self.parts) + "]"


EMPTY = IntervalSet(())


def normalize(parts: Iterable[Interval]) -> IntervalSet:
    """Sort, merge touching/overlapping parts, drop points unless all are points.

    Idempotent; the result represents the same union of points up to the
    dropped zero-measure singletons.
    """
    items = []
    for p in parts:
        if p.lo > p.hi:
            raise MalformedInterval(f"interval with lo > hi: {p}")
        items.append(p)
    items.sort()
    merged = []
    for p in items:
        if merged and p.lo <= merged[-1].hi:
            if p.hi > merged[-1].hi:
                merged[-1] = Interval(merged[-1].lo, p.hi)
        else:
            merged.append(p)
    if any(p.lo < p.hi for p in merged):
        merged = [p for p in merged if p.lo < p.hi]
        # re-merge: dropping a point can never reconnect anything
    return IntervalSet(tuple(merged))


def interval_set(iv: Interval) -> IntervalSet:
    return normalize([iv])


def boolean(s: IntervalSet, t: IntervalSet, op: str) -> IntervalSet:
    """Pointwise set operation under the closed conventions above."""
    if op == "union":
        return s.union(t)
    if op == "intersection":
        return s.intersection(t)
    if op == "difference":
        return s.difference(t)
    raise ValueError(f"unknown boolean op: {op!r}")


def measure(s: IntervalSet) -> Rational:
    return s.measure()


def distance(s: IntervalSet, t: IntervalSet) -> Optional[Rational]:
    """Exact infimum of |x - y| over x in s, y in t; 0 when the closed unions meet.

    Returns None (the "infinite distance" signal) when either set is empty.
    """
    if s.is_empty or t.is_empty:
        return None
    best = None
    i = j = 0
    a, b = s.parts, t.parts
    while i < len(a) and j < len(b):
        if a[i].hi < b[j].lo:
            gap = b[j].lo - a[i].hi
            i += 1
        elif b[j].hi < a[i].lo:
            gap = a[i].lo - b[j].hi
            j += 1
        else:
            return ZERO
        if best is None or gap < best:
            best = gap
    return best


def dilate(s: IntervalSet, margin) -> IntervalSet:
    """Grow every part by margin on both sides (margin >= 0)."""
    if margin < 0:
        raise ValueError("dilate margin must be nonnegative")
    return normalize([Interval(p.lo - margin, p.hi + margin) for p in s.parts])


def complement_within(s: IntervalSet, ambient: Interval) -> IntervalSet:
    """Closure of ambient minus s; complements need an explicit ambient."""
    return interval_set(ambient).difference(s)
