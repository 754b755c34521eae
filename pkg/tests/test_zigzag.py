import pytest

from conftest import random_family_script
from pwlab._rat import pow2, rat
from pwlab.intervals import IntervalSet, ivl
from pwlab.pwl import PWL
from pwlab.scenarios import fat_cantor_default_K, fat_cantor_script
from pwlab.zigzag import (
    FamilyScript,
    LinearityError,
    ScriptError,
    build_run,
    build_stage,
    classify_well_located,
    peers,
    select_core,
    shrink,
    triple,
    validate_family,
    verify_core_images,
    verify_image_identity,
    verify_locality,
    verify_measure_bounds,
    with_choice,
)

ZIG = PWL([(0, 0), ("1/3", 1), ("2/3", 0), (1, 1)])


def iset(*pairs):
    return IntervalSet.of(*pairs)


def script_of(levels, epsilon="1/4"):
    return FamilyScript.of(levels, epsilon)


TRIVIAL = script_of([[(0, 1)]])


def ninths(lo, count=9):
    """count consecutive ninths of [0,1] starting at lo, as interval pairs."""
    lo = rat(lo)
    return [(lo + rat(i, 27), lo + rat(i + 1, 27)) for i in range(count)]


class TestValidate:
    def test_single_level_valid(self):
        assert validate_family(TRIVIAL).ok

    def test_fat_cantor_valid(self):
        assert validate_family(fat_cantor_script(2)).ok

    def test_third_straddling_breaks_condition_5(self):
        bad = script_of([[(0, 1)], [(0, rat(1, 27)), (rat(8, 27), rat(10, 27))]])
        rep = validate_family(bad)
        assert not rep.ok
        assert any(v.condition == 5 and v.level == 1 and v.k == 1 for v in rep.violations)

    def test_overlap_breaks_condition_2(self):
        bad = script_of([[(0, rat(2, 3)), (rat(1, 3), 1)]])
        rep = validate_family(bad)
        assert any(v.condition == 2 for v in rep.violations)

    def test_length_order_breaks_condition_4(self):
        bad = script_of([[(0, rat(1, 4)), (rat(1, 2), 1)]])
        rep = validate_family(bad)
        assert any(v.condition == 4 for v in rep.violations)

    def test_touching_complement_breaks_condition_3(self):
        # the level-1 interval touches the right endpoint of the level-0 one
        bad = script_of([[(0, rat(1, 2))], [(rat(17, 36), rat(1, 2))]])
        rep = validate_family(bad)
        assert any(v.condition == 3 for v in rep.violations)

    def test_infinitary_condition_noted(self):
        rep = validate_family(TRIVIAL)
        assert any("not checkable" in note for note in rep.notes)


class TestShrink:
    def test_margin_is_half_the_distance(self):
        a = iset(("1/4", "1/2"))
        u = iset((0, 1))
        v = shrink(a, u, ivl(-1, 2))
        assert v == iset(("1/8", "5/8"))

    def test_a_equal_u(self):
        # positive distance to the complement with a equal to u needs the
        # complement empty, i.e. u covering the ambient
        u = iset((0, 1))
        assert shrink(u, u, ivl(0, 1)) == u
        with pytest.raises(ScriptError):
            shrink(iset(("1/4", "1/2")), iset(("1/4", "1/2")), ivl(-1, 2))

    def test_point_input_dilates(self):
        v = shrink(iset(("1/2", "1/2")), iset((0, 1)), ivl(-1, 2))
        assert v == iset(("1/4", "3/4"))

    def test_rejects_escaping_set(self):
        with pytest.raises(ScriptError):
            shrink(iset((0, "3/4")), iset((0, "1/2")), ivl(-1, 2))

    def test_rejects_touching(self):
        with pytest.raises(ScriptError):
            shrink(iset((0, "1/4")), iset((0, 1)), ivl(-1, 2))

    def test_sandwich_postcondition(self):
        a = iset(("1/3", "5/12"), ("2/3", "3/4"))
        u = iset(("1/4", "7/8"))
        v = shrink(a, u, ivl(0, 1))
        assert v.contains_set(a) and u.contains_set(v)
        from pwlab.intervals import complement_within, distance

        comp = complement_within(u, ivl(0, 1))
        d_au = distance(a, comp)
        assert distance(v, comp) >= d_au / 2


class TestTriple:
    def test_identity_full(self):
        assert triple(PWL.identity(), ivl(0, 1)) == ZIG

    def test_flat_segment_degenerates(self):
        f = PWL([(0, "1/2"), (1, "1/2")])
        g = triple(f, ivl(0, 1))
        assert g.sup_distance(f) == 0

    def test_nested_zigzag(self):
        g = triple(ZIG, ivl(0, "1/3"))
        assert g.breakpoints[:4] == ((0, 0), (rat(1, 9), 1), (rat(2, 9), 0), (rat(1, 3), 1))
        slopes = list(g.slopes())
        assert slopes[0] == 9 and slopes[1] == -9 and slopes[2] == 9

    def test_rejects_nonlinear_segment(self):
        with pytest.raises(LinearityError):
            triple(ZIG, ivl(0, "2/3"))

    def test_collinear_breakpoints_allowed(self):
        f = PWL.identity().subdivide_by_height("1/4")
        assert triple(f, ivl(0, 1)) == ZIG

    def test_endpoints_and_range_preserved(self):
        g = triple(PWL.identity(), ivl("1/3", "2/3"))
        assert g.value_at(0) == 0 and g.value_at(1) == 1
        assert g.image(iset(("1/3", "2/3"))) == iset(("1/3", "2/3"))


class TestSelectCore:
    def test_maximizing_third(self):
        # deepest level fills the first third only
        script = script_of([[(0, 1)], ninths(0)])
        core = select_core(script)
        assert core.choices[0][0] == 0
        assert core.cores[1].measure() == rat(1, 3)

    def test_tie_breaks_to_smallest_index(self):
        script = script_of([[(0, 1)], ninths(0) + ninths(rat(2, 3))])
        core = select_core(script)
        assert core.choices[0][0] == 0

    def test_fat_cantor_bounds_hold(self):
        script = fat_cantor_script(3)
        core = select_core(script)
        assert verify_measure_bounds(core, script).ok

    def test_invalid_script_rejected(self):
        bad = script_of([[(0, rat(2, 3)), (rat(1, 3), 1)]])
        with pytest.raises(ScriptError):
            select_core(bad)

    def test_minimal_cutoffs(self):
        script = fat_cantor_script(3)
        core = select_core(script)
        for n, level in enumerate(script.levels):
            cut = core.cutoffs[n]
            tail = sum((iv.length for iv in level[cut + 1 :]), rat(0))
            bound = pow2(-n - 2) * script.epsilon / (3**n)
            assert tail < bound
            if cut > 0:
                assert tail + level[cut].length >= bound


class TestBuildStage:
    def test_length_cutoff_skips_everything(self):
        core = select_core(TRIVIAL)
        st = build_stage(TRIVIAL, core, 1, 0)
        assert st.f.breakpoints == ((0, 0), (rat(1, 2), rat(1, 2)), (1, 1))

    def test_single_tripling(self):
        core = select_core(TRIVIAL)
        st = build_stage(TRIVIAL, core, 0, 4)
        assert st.f == ZIG

    def test_fat_cantor_stage_bounds(self):
        script = fat_cantor_script(3)
        core = select_core(script)
        run = build_run(script, core, 3, 12)
        f3, f2 = run.states[3].f, run.states[2].f
        assert f3.sup_distance(f2) <= pow2(-3)
        assert f3.max_abs_slope() <= 3**4
        assert run.states[2].f.max_abs_slope() <= 3**3

    def test_endpoint_preservation(self):
        script = fat_cantor_script(2)
        run = build_run(script, select_core(script), 2, 12)
        for st in run.states:
            assert st.f.value_at(0) == 0 and st.f.value_at(1) == 1

    def test_b_levels_nested_with_small_measure(self):
        script = fat_cantor_script(3)
        run = build_run(script, select_core(script), 3, 12)
        bl = run.states[3].B_levels
        for n in range(len(bl) - 1):
            assert bl[n].contains_set(bl[n + 1])
        for n, b in enumerate(bl):
            assert b.measure() <= pow2(0) / (3**n)


class TestMeasureBounds:
    def test_trivial_level_zero(self):
        core = select_core(TRIVIAL)
        rep = verify_measure_bounds(core, TRIVIAL)
        assert rep.ok
        assert rep.levels[0].core_measure == 1

    def test_corrupted_choice_breaks_lower_bound(self):
        script = fat_cantor_script(3)
        core = select_core(script)
        bad = with_choice(script, core, 0, 0, 2)
        rep = verify_measure_bounds(bad, script)
        assert not rep.ok
        fail = rep.first_failure()
        assert fail is not None and fail.level >= 1
        assert not fail.lower_ok_weak  # even the plain bound fails

    def test_corrupting_into_mid_third_still_passes(self):
        # the second third carries almost as much mass; the slack absorbs it
        script = fat_cantor_script(3)
        core = select_core(script)
        rep = verify_measure_bounds(with_choice(script, core, 0, 0, 1), script)
        assert rep.ok_weak


class TestWellLocated:
    def test_script_interval_is_well_located(self):
        script = fat_cantor_script(2)
        wl = classify_well_located(script.levels[1][0], script)
        assert wl.well_located and wl.containment_depth >= 1
        assert wl.tripling_depth == 1

    def test_root_is_well_located_at_depth_zero(self):
        wl = classify_well_located(ivl(0, 1), TRIVIAL)
        assert wl.well_located and wl.containment_depth == 0
        assert wl.tripling_depth == 0

    def test_straddler_is_not_well_located(self):
        script = script_of([[(0, rat(1, 2)), (rat(1, 2), 1)]])
        wl = classify_well_located(ivl("1/4", "3/4"), script)
        assert not wl.well_located and wl.failure is not None

    def test_peers_share_thirds(self):
        script = fat_cantor_script(2)
        a, b = script.levels[1][0], script.levels[1][1]
        assert peers(a, b, script)

    def test_non_peers_detected(self):
        script = script_of([[(0, 1)], ninths(0, 3) + ninths(rat(1, 3), 3)])
        in_t0 = script.levels[1][0]
        in_t1 = script.levels[1][3]
        assert not peers(in_t0, in_t1, script)


class TestImageIdentity:
    def test_first_third_under_zigzag(self):
        run = build_run(TRIVIAL, select_core(TRIVIAL), 1, 4)
        rep = verify_image_identity(run, ivl(0, "1/3"), 1)
        assert rep.ok and rep.expected == 1

    def test_identity_stage_depth_zero(self):
        run = build_run(TRIVIAL, select_core(TRIVIAL), 1, 0)  # nothing tripled
        rep = verify_image_identity(run, ivl(0, 1))
        assert rep.ok and rep.exponent == 0

    def test_all_core_members_at_depth_3(self):
        script = fat_cantor_script(3)
        core = select_core(script)
        run = build_run(script, core, 3, fat_cantor_default_K(3))
        assert verify_core_images(run).ok
        for n in range(4):
            for k in core.members[n][:2]:
                rep = verify_image_identity(run, script.levels[n][k])
                assert rep.ok and rep.exponent == n

    def test_depth_mismatch_rejected(self):
        run = build_run(TRIVIAL, select_core(TRIVIAL), 1, 4)
        with pytest.raises(ScriptError):
            verify_image_identity(run, ivl(0, "1/3"), 2)

    def test_not_well_located_rejected(self):
        script = script_of([[(0, rat(1, 2)), (rat(1, 2), 1)]])
        run = build_run(script, select_core(script), 0, 12)
        with pytest.raises(ScriptError):
            verify_image_identity(run, ivl("1/4", "3/4"))


class TestLocality:
    def _window_script(self):
        # level 1 fills both outer thirds; (1/3, 2/3) stays clear
        tiles = [(rat(i, 12), rat(i + 1, 12)) for i in range(4)]
        tiles += [(rat(8, 12) + rat(i, 12), rat(9, 12) + rat(i, 12)) for i in range(4)]
        return script_of([[(0, 1)], tiles])

    def test_point_in_cleared_middle(self):
        script = self._window_script()
        run = build_run(script, select_core(script), 1, 12)
        rep = verify_locality(script, "1/2", run)
        assert rep.status == "outside" and rep.N == 0
        a, b = rep.window
        assert rat(1, 3) <= a < b <= rat(2, 3)
        assert rep.stable_ok

    def test_point_in_proxy(self):
        script = fat_cantor_script(3)
        rep = verify_locality(script, "1/100")
        assert rep.status == "in_proxy"

    def test_point_never_touched(self):
        script = script_of([[(0, rat(1, 2))]])
        run = build_run(script, select_core(script), 0, 12)
        rep = verify_locality(script, "3/4", run)
        assert rep.status == "untouched" and rep.N == -1
        assert rep.piece_count == 1
        assert rep.slope_range == (1, 1)


class TestRandomScripts:
    """The measure sandwich and the image identities are theorems about any
    valid family, so they must hold on randomized scripts too."""

    def test_random_scripts_satisfy_all_verifiers(self):
        import random

        rng = random.Random(314159)
        checked = 0
        while checked < 12:
            script = random_family_script(rng, rng.randint(1, 3))
            if script.depth == 0:
                continue
            rep = validate_family(script)
            assert rep.ok, [str(v) for v in rep.violations]
            core = select_core(script)
            assert verify_measure_bounds(core, script).ok
            run = build_run(script, core, script.depth, 24)
            assert verify_core_images(run).ok
            for n in range(script.depth):
                d = run.states[n + 1].f.sup_distance(run.states[n].f)
                assert d <= pow2(-n - 1)
            for st in run.states:
                assert st.f.max_abs_slope() <= 3 ** (st.N + 1)
            checked += 1


class TestPieceStructureFinality:
    def test_untouched_region_is_final_across_stages(self):
        script = fat_cantor_script(3)
        run = build_run(script, select_core(script), 3, 12)
        # a window below the first level-1 interval start never changes
        first_lo = min(iv.lo for iv in script.levels[1])
        window = (rat(0), first_lo)
        if window[0] < window[1]:
            base = run.states[1].f.restrict(*window)
            for st in run.states[2:]:
                assert st.f.restrict(*window).agrees_with(base)
