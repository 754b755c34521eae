"""Acceptance suite: one test per criterion, every check an exact rational
identity. Run with `pytest -s tests/test_acceptance.py` to see the verdict
lines."""

import random

from conftest import random_interval_set, random_nondecreasing_pwl, random_pwl
from test_pwl import _refinement_oracle_measure, two_linear_brute_force

from pwlab._rat import pow2, rat
from pwlab.concentrate import (
    ConcentrateResult,
    concentrate,
    verify_concentrate,
    verify_kurtz_image,
)
from pwlab.intervals import IntervalSet
from pwlab.pwl import PWL, check_2L
from pwlab.zigzag import verify_measure_bounds, with_choice


def _verdict(num, name, ok, extra=""):
    line = f"criterion {num} ({name}): {'PASS' if ok else 'FAIL'}"
    if extra:
        line += f" [{extra}]"
    print(line)
    assert ok, line


def test_criterion_1_zigzag_measure_bounds(zigzag_acceptance):
    z = zigzag_acceptance
    assert z.script.epsilon == rat(1, 4)
    proxy = z.bounds.proxy_measure
    assert 2 * proxy >= 1, "deepest-level measure must be at least 1/2"
    ok = True
    for lv in z.bounds.levels:
        ok &= lv.core_measure <= pow2(0) / (3**lv.level)
        ok &= (3**lv.level) * lv.core_inter_proxy >= proxy - z.script.epsilon
        ok &= lv.lower_ok_strong  # the strengthened proof-level form
    ok &= len(z.bounds.levels) == 7
    ok &= z.elapsed < 30
    _verdict(1, "zigzag measure bounds", ok, f"runtime {z.elapsed:.1f}s")


def test_criterion_2_image_identity(zigzag_acceptance):
    z = zigzag_acceptance
    ok = z.images.ok and len(z.images.levels) == 7
    f6 = z.run.states[6].f
    for n, members in enumerate(z.core.members):
        factor = 3**n
        for k in members:
            iv = z.script.levels[n][k]
            if f6.envelope(iv).length != factor * iv.length:
                ok = False
    _verdict(2, "image identity and peer overlaps", ok)


def test_criterion_3_convergence_moduli(zigzag_acceptance, chain_acceptance):
    ok = all(
        zigzag_acceptance.cauchy[n] <= pow2(-n - 1) for n in range(6)
    )
    for n, step in enumerate(chain_acceptance.steps):
        ok &= step.cauchy < pow2(-n)
    _verdict(3, "convergence moduli", ok)


def test_criterion_4_concentrate_postconditions():
    rng = random.Random(42424242)
    deltas = [rat(1, 2), rat(1, 8), rat(1, 64)]
    done = 0
    ok = True
    while done < 100:
        h = random_nondecreasing_pwl(rng, 20, 64)
        lo, hi = h.breakpoints[0][1], h.breakpoints[-1][1]
        if lo == hi:
            continue
        b = random_interval_set(rng, 4, 64, lo, hi)
        if b.is_empty or b.is_pure_points:
            continue
        delta = deltas[done % 3]
        res = concentrate(h, b, delta)
        ok &= verify_concentrate(h, b, delta, res).ok
        done += 1
    worked = concentrate(PWL.identity(), IntervalSet.of((0, 1)), "1/2")
    ok &= worked.function.breakpoints == (
        (0, 0),
        (rat(1, 8), rat(1, 2)),
        (rat(1, 2), rat(1, 2)),
        (rat(5, 8), 1),
        (1, 1),
    )
    ok &= worked.steep_set == IntervalSet.of((0, "1/8"), ("1/2", "5/8"))
    ok &= worked.steep_set.measure() == rat(1, 4)
    _verdict(4, "concentrate postconditions on 100 random instances", ok)


def test_criterion_5_null_set_onto_large_measure(chain_acceptance):
    chain = chain_acceptance
    ok = all(2 * step.target.measure() > 1 for step in chain.steps)
    f9_set = chain.steps[9].steep_set
    ok &= f9_set.measure() < pow2(-9)
    image = chain.functions[10].image(f9_set)
    ok &= 2 * image.measure() > 1
    ok &= image == chain.steps[9].target
    _verdict(5, "null set mapped onto large measure", ok)


def test_criterion_6_priority_run(priority_acceptance):
    result = priority_acceptance.result
    final = result.final
    ok = sum(final.budgets, rat(0)) == rat(7, 32)
    ok &= len(result.records) == 20
    ok &= result.b_always_large
    ok &= result.all_frozen
    for e in range(len(final.strategies)):
        rep = verify_kurtz_image(final, e)
        ok &= rep.status == "frozen" and rep.value < rat(1, 100)
    ok &= priority_acceptance.elapsed < 60
    _verdict(6, "priority run freezes with null images", ok,
             f"runtime {priority_acceptance.elapsed:.1f}s")


def test_criterion_7_oracle_equivalence():
    rng = random.Random(77777)
    ok = True
    for _ in range(200):
        f = random_pwl(rng, 50, 256)
        s = random_interval_set(rng, 4, 256)
        ok &= f.image(s).measure() == _refinement_oracle_measure(f, s)
        lo, hi = f.domain
        a = lo + (hi - lo) * rat(rng.randint(0, 61), 125)
        b = a + (hi - a) * rat(rng.randint(1, 125), 125)
        if a < b:
            ok &= check_2L(f, a, b).holds == two_linear_brute_force(f, a, b)
    _verdict(7, "image measure and 2L oracle equivalence", ok)


def test_criterion_8_negative_controls(zigzag_acceptance):
    z = zigzag_acceptance
    corrupted = with_choice(z.script, z.core, 0, 0, 2)
    rep = verify_measure_bounds(corrupted, z.script)
    fail = rep.first_failure()
    ok = (not rep.ok) and fail is not None and not fail.lower_ok_weak

    res = concentrate(PWL.identity(), IntervalSet.of((0, 1)), "1/2")
    tampered = ConcentrateResult(res.function, IntervalSet(res.steep_set.parts[1:]))
    bad = verify_concentrate(PWL.identity(), IntervalSet.of((0, 1)), "1/2", tampered)
    ok &= not bad.covers_target or not bad.steep_consistent
    ok &= not bad.ok
    _verdict(8, "negative controls detected", ok)
