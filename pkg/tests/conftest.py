import random
from time import perf_counter
from types import SimpleNamespace

import pytest

from pwlab._rat import rat
from pwlab.intervals import Interval, IntervalSet, normalize
from pwlab.pwl import PWL


def random_rational(rng: random.Random, max_den: int, lo=0, hi=1):
    den = rng.randint(1, max_den)
    num = rng.randint(0, den)
    return rat(lo) + (rat(hi) - rat(lo)) * rat(num, den)


def random_pwl(rng: random.Random, max_bps: int, max_den: int) -> PWL:
    n = rng.randint(2, max_bps)
    xs = {rat(0), rat(1)}
    while len(xs) < n:
        xs.add(random_rational(rng, max_den))
    xs = sorted(xs)
    ys = [random_rational(rng, max_den) for _ in xs]
    return PWL(list(zip(xs, ys)))


def random_nondecreasing_pwl(rng: random.Random, max_pieces: int, max_den: int) -> PWL:
    n = rng.randint(2, max_pieces + 1)
    xs = {rat(0), rat(1)}
    while len(xs) < n:
        xs.add(random_rational(rng, max_den))
    xs = sorted(xs)
    y = rat(0)
    ys = [y]
    for _ in xs[1:]:
        if rng.random() < 0.25:
            step = rat(0)  # flat pieces are first-class
        else:
            step = random_rational(rng, max_den)
        y = y + step
        ys.append(y)
    return PWL(list(zip(xs, ys)))


def random_interval_set(rng: random.Random, k: int, max_den: int, lo=0, hi=1) -> IntervalSet:
    parts = []
    for _ in range(k):
        a = random_rational(rng, max_den, lo, hi)
        b = random_rational(rng, max_den, lo, hi)
        if a > b:
            a, b = b, a
        parts.append(Interval(a, b))
    return normalize(parts)


def random_family_script(rng: random.Random, depth: int, epsilon="1/4"):
    """A random valid family script: per interval and third, up to three
    children of random ninth-scale lengths, kept clear of the parent's
    endpoints so every level stays at positive distance from the previous
    level's complement."""
    from pwlab.zigzag import FamilyScript

    root = Interval(rat(0), rat(1))
    levels = [(root,)]
    current = [root]
    for _ in range(depth):
        children = []
        for parent in current:
            plen = parent.length
            margin = plen / rat(30)
            for t in range(3):
                t_lo = parent.lo + t * plen / 3
                cursor = t_lo if t != 0 else t_lo + margin
                t_hi = parent.lo + (t + 1) * plen / 3
                limit = t_hi if t != 2 else t_hi - margin
                for _ in range(rng.randint(0, 3)):
                    length = plen * rat(rng.randint(3, 10), 100)  # below plen/9
                    gap = plen * rat(rng.randint(0, 3), 100)
                    lo = cursor + gap
                    if lo + length > limit:
                        break
                    children.append(Interval(lo, lo + length))
                    cursor = lo + length
        if not children:
            break
        children.sort(key=lambda iv: (-iv.length, iv.lo))
        levels.append(tuple(children))
        current = children
    return FamilyScript(levels=tuple(levels), epsilon=rat(epsilon), ambient=root)


@pytest.fixture(scope="session")
def zigzag_acceptance():
    from pwlab.scenarios import fat_cantor_default_K, fat_cantor_script
    from pwlab.zigzag import (
        build_run,
        select_core,
        verify_core_images,
        verify_measure_bounds,
    )

    t0 = perf_counter()
    script = fat_cantor_script(6)
    core = select_core(script)
    bounds = verify_measure_bounds(core, script)
    run = build_run(script, core, 6, fat_cantor_default_K(6))
    cauchy = [run.states[n + 1].f.sup_distance(run.states[n].f) for n in range(6)]
    images = verify_core_images(run)
    elapsed = perf_counter() - t0
    return SimpleNamespace(
        script=script,
        core=core,
        bounds=bounds,
        run=run,
        cauchy=cauchy,
        images=images,
        elapsed=elapsed,
    )


@pytest.fixture(scope="session")
def chain_acceptance():
    from pwlab.concentrate import build_chain

    targets = [IntervalSet.of((0, 1))] * 10
    return build_chain(targets, 10)


@pytest.fixture(scope="session")
def priority_acceptance():
    from pwlab.concentrate import run_priority
    from pwlab.scenarios import priority_demo_budgets, priority_demo_points

    t0 = perf_counter()
    result = run_priority(priority_demo_budgets(), priority_demo_points(), 20)
    elapsed = perf_counter() - t0
    return SimpleNamespace(result=result, elapsed=elapsed)
