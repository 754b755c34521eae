"""Built-in scenario generators.

The fat-Cantor family is the desk-scale stand-in for a nowhere dense closed
set of large measure. Its shape: the root splits into a measure-rich subtree
under its first third and a slightly leaner subtree under the second, while
the last third stays empty. Every deeper interval spawns nine children,
three per third, centered with a safety margin so that each level keeps a
positive distance to the complement of the previous one. The two subtree
densities differ, so the measure-maximizing third choice at the root is
strict, and redirecting it into the empty third is a genuine negative
control: the core chain dies and the lower measure bound fails.
"""

from __future__ import annotations

from ._rat import ONE, ZERO, pow2, rat
from .intervals import Interval, IntervalSet
from .zigzag import FamilyScript

KAPPA_RICH = rat(27, 250)
KAPPA_MID = rat(26, 250)


def _children(iv: Interval, kappa) -> list:
    """Nine children, three per third, centered inside each third."""
    length = iv.length
    c = kappa * length
    margin = (length / 3 - 3 * c) / 2
    out = []
    for t in range(3):
        base = iv.lo + t * length / 3 + margin
        for k in range(3):
            out.append(Interval(base + k * c, base + (k + 1) * c))
    return out


def fat_cantor_script(depth: int = 6, epsilon="1/4") -> FamilyScript:
    """Levels 0..depth; deepest-level measure stays above 1/2 for depth <= 6."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    root = Interval(ZERO, ONE)
    rich = []
    mid = []
    # level 1: rich children fill the first third, mid children the second
    length = root.length
    c_r = KAPPA_RICH * length
    m_r = (length / 3 - 3 * c_r) / 2
    for k in range(3):
        rich.append(Interval(m_r + k * c_r, m_r + (k + 1) * c_r))
    c_m = KAPPA_MID * length
    m_m = (length / 3 - 3 * c_m) / 2
    base = length / 3 + m_m
    for k in range(3):
        mid.append(Interval(base + k * c_m, base + (k + 1) * c_m))
    levels = [(root,), tuple(rich + mid)]
    for _ in range(2, depth + 1):
        rich = [ch for iv in rich for ch in _children(iv, KAPPA_RICH)]
        mid = [ch for iv in mid for ch in _children(iv, KAPPA_MID)]
        levels.append(tuple(rich + mid))
    return FamilyScript(levels=tuple(levels), epsilon=rat(epsilon), ambient=root)


def fat_cantor_default_K(depth: int = 6) -> int:
    """Smallest K whose length cutoff 2^-K keeps every script interval."""
    shortest = KAPPA_MID**depth
    k = 0
    while pow2(-k) >= shortest:
        k += 1
    return k


def constant_targets(parts, stages: int) -> list:
    """The same target set at every chain stage."""
    s = IntervalSet.of(*parts)
    return [s] * stages


def priority_demo_budgets() -> tuple:
    return (rat(3, 32), rat(1, 16), rat(1, 16))


def priority_demo_points() -> tuple:
    return (rat(1, 4), rat(1, 2), rat(3, 4))
