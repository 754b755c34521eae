"""Command-line front end.

Subcommands: run (execute a scenario, write stage dumps and exports),
verify (run the exact checkers only), inspect (query a dumped function).

Exit codes: 0 all requested checks pass, 1 an exact identity failed (the
first failing check is named), 2 malformed input (message carries the
location).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from ._rat import pow2, rat, rat_str
from .intervals import Error
from .io_json import (
    ScenarioError,
    dumps,
    load_dump,
    load_scenario,
    pwl_from_json,
    pwl_to_json,
    rational_to_json,
    set_from_json,
    set_to_json,
)
from .pwl import check_2L, check_bilipschitz
from .concentrate import (
    ConcentrateResult,
    build_chain,
    run_priority,
    verify_concentrate,
)
from .zigzag import (
    build_run,
    select_core,
    validate_family,
    verify_core_images,
    verify_measure_bounds,
    with_choice,
)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pwlab",
        description="exact piecewise-linear measure constructions and verifiers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario, write stage dumps and exports")
    p_run.add_argument("scenario")
    p_run.add_argument("--out", default=None, help="output directory (default $PWLAB_OUT or ./out)")
    p_run.add_argument("--stages", type=int, default=None)
    p_run.add_argument("--verify", action="store_true", help="run the exact checkers")
    p_run.add_argument(
        "--export",
        default="json",
        help="comma list of json,csv,svg,png (default json)",
    )
    p_run.add_argument("--grid", type=int, default=0, help="CSV sample grid (0 = breakpoints)")

    p_ver = sub.add_parser("verify", help="run the exact checkers, write nothing")
    p_ver.add_argument("scenario")
    p_ver.add_argument("--stages", type=int, default=None)

    p_ins = sub.add_parser("inspect", help="query a dumped function")
    p_ins.add_argument("dump")
    p_ins.add_argument("query")
    p_ins.add_argument("args", nargs="*")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args, do_write=True)
        if args.command == "verify":
            args.export = ""
            args.grid = 0
            args.out = None
            args.verify = True
            return _cmd_run(args, do_write=False)
        return _cmd_inspect(args)
    except ScenarioError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except Error as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


def _cmd_run(args, do_write: bool) -> int:
    scenario = load_scenario(args.scenario)
    if args.stages is not None:
        scenario.payload["stages"] = args.stages
    exports = [e for e in args.export.split(",") if e] if do_write else []
    out = None
    if do_write:
        out = Path(args.out or os.environ.get("PWLAB_OUT", "out"))
        out.mkdir(parents=True, exist_ok=True)

    if scenario.kind == "zigzag":
        checks = _run_zigzag(scenario.payload, out, exports, args.grid, args.verify)
    elif scenario.kind == "concentrate":
        checks = _run_concentrate(scenario.payload, out, exports, args.grid, args.verify)
    else:
        checks = _run_priority(scenario.payload, out, exports, args.grid, args.verify)

    if args.verify:
        all_pass = all(ok for _, ok in checks)
        for name, ok in checks:
            print(("PASS" if ok else "FAIL") + f" {name}")
        if out is not None:
            report = {
                "kind": "verdict",
                "scenario_kind": scenario.kind,
                "checks": [{"name": n, "pass": ok} for n, ok in checks],
                "all_pass": all_pass,
            }
            (out / "verdict.json").write_text(dumps(report), encoding="utf-8")
        if not all_pass:
            first = next(n for n, ok in checks if not ok)
            print(f"first failing identity: {first}", file=sys.stderr)
            return 1
    return 0


def _exports_for(out, exports, grid, name, f, shaded=None, title=""):
    from . import exports as ex

    if "csv" in exports:
        ex.write_csv(out / f"{name}.csv", f, grid)
    if "svg" in exports:
        ex.write_svg(out / f"{name}.svg", f)
    if "png" in exports:
        ex.write_png(out / f"{name}.png", f, shaded=shaded, title=title)


def _run_zigzag(payload, out, exports, grid, do_verify):
    script = payload["script"]
    report = validate_family(script)
    if not report.ok:
        raise ScenarioError("; ".join(str(v) for v in report.violations))
    core = select_core(script)
    if payload.get("corrupt"):
        n, k, b = payload["corrupt"]
        core = with_choice(script, core, n, k, b)
    stages = payload["stages"]
    run = build_run(script, core, stages, payload["K"])

    summary_rows = []
    for st in run.states:
        checks = {
            "endpoints_preserved": st.f.breakpoints[0][1] == script.ambient.lo
            and st.f.breakpoints[-1][1] == script.ambient.hi,
            "b_measure_upper_ok": all(
                run.core.cores[m].measure() * (3**m) <= 1 for m in range(min(st.N + 1, len(run.core.cores)))
            ),
        }
        if st.N > 0:
            d = st.f.sup_distance(run.states[st.N - 1].f)
            checks["cauchy_ok"] = d <= pow2(-st.N)
        if out is not None:
            if "json" in exports:
                dump = {
                    "kind": "zigzag-stage",
                    "N": st.N,
                    "K": st.K,
                    "breakpoints": pwl_to_json(st.f),
                    "B_levels": [set_to_json(s) for s in st.B_levels],
                    "checks": checks,
                }
                (out / f"stage_{st.N:03d}.json").write_text(dumps(dump), encoding="utf-8")
            shade = {f"B_{len(st.B_levels)-1}": st.B_levels[-1]} if st.B_levels else None
            _exports_for(out, exports, grid, f"stage_{st.N:03d}", st.f, shade, f"stage {st.N}")
        summary_rows.append(
            [st.N, len(st.f.breakpoints) - 1, rat_str(st.f.variation()), int(all(checks.values()))]
        )
    if out is not None and "csv" in exports:
        from .exports import write_summary_csv

        write_summary_csv(
            out / "summary.csv", summary_rows, ["stage", "pieces", "variation", "checks_ok"]
        )

    checks = []
    if do_verify:
        mb = verify_measure_bounds(core, script)
        for lv in mb.levels:
            checks.append((f"measure_upper_level{lv.level}", lv.upper_ok))
            checks.append((f"measure_lower_level{lv.level}", lv.lower_ok_strong))
        ci = verify_core_images(run)
        for n, flags in enumerate(ci.levels):
            ident, overlaps, prs, stage_ok = flags
            checks.append((f"image_identity_level{n}", ident))
            checks.append((f"peer_image_overlaps_level{n}", overlaps))
            checks.append((f"pairwise_peers_level{n}", prs))
            checks.append((f"level_image_measure_level{n}", stage_ok))
        for n in range(run.stages):
            d = run.states[n + 1].f.sup_distance(run.states[n].f)
            checks.append((f"cauchy_stage{n + 1}", d <= pow2(-n - 1)))
    return checks


def _run_concentrate(payload, out, exports, grid, do_verify):
    targets = payload["targets"]
    stages = payload["stages"]
    chain = build_chain(targets, stages)
    post_reports = []
    for n, step in enumerate(chain.steps):
        rep = verify_concentrate(
            chain.functions[n],
            step.target,
            step.delta,
            ConcentrateResult(chain.functions[n + 1], step.steep_set),
        )
        post_reports.append(rep)
    if out is not None:
        for i, f in enumerate(chain.functions):
            if "json" in exports:
                dump = {"kind": "concentrate-stage", "n": i, "breakpoints": pwl_to_json(f)}
                if i > 0:
                    step = chain.steps[i - 1]
                    dump["delta"] = rational_to_json(step.delta)
                    dump["target"] = set_to_json(step.target)
                    dump["steep_set"] = set_to_json(step.steep_set)
                    dump["checks"] = {
                        "cauchy_ok": step.cauchy_ok,
                        "steep_small": step.steep_small,
                        "postconditions_ok": post_reports[i - 1].ok,
                    }
                (out / f"stage_{i:03d}.json").write_text(dumps(dump), encoding="utf-8")
            shade = {"steep": chain.steps[i - 1].steep_set} if i > 0 else None
            _exports_for(out, exports, grid, f"stage_{i:03d}", f, shade, f"chain stage {i}")
    checks = []
    if do_verify:
        for n, step in enumerate(chain.steps):
            checks.append((f"cauchy_step{n}", step.cauchy_ok))
            checks.append((f"steep_small_step{n}", step.steep_small))
            checks.append((f"postconditions_step{n}", post_reports[n].ok))
        checks.append(("witness_persistence", chain.witness_persistence()))
    return checks


def _run_priority(payload, out, exports, grid, do_verify):
    stage_checks = []

    def on_stage(state, record):
        ok_b = 2 * record.b_measure > 1
        stage_checks.append((f"b_measure_stage{record.stage}", ok_b))
        if out is not None:
            if "json" in exports:
                dump = {
                    "kind": "priority-stage",
                    "s": record.stage,
                    "breakpoints": pwl_to_json(state.f),
                    "B": set_to_json(state.B),
                    "cells": [set_to_json(st.cell) for st in state.strategies],
                    "frozen": [st.frozen for st in state.strategies],
                    "checks": {"b_measure_ok": ok_b},
                }
                (out / f"stage_{record.stage:03d}.json").write_text(dumps(dump), encoding="utf-8")
            shade = {
                f"cell_{e}": st.cell for e, st in enumerate(state.strategies)
            }
            _exports_for(
                out, exports, grid, f"stage_{record.stage:03d}", state.f, shade,
                f"priority stage {record.stage}",
            )

    result = run_priority(
        payload["budgets"],
        payload["points"],
        payload["stages"],
        schedules=payload["schedules"],
        on_stage=on_stage,
    )
    checks = []
    if do_verify:
        total = sum(payload["budgets"], rat(0))
        checks.append(("budget_sum_below_half", 2 * total < 1))
        checks.extend(stage_checks)
        for e, st in enumerate(result.final.strategies):
            checks.append((f"cell_within_budget_e{e}", st.cell.measure() <= st.epsilon))
    return checks


def _cmd_inspect(args) -> int:
    dump = load_dump(args.dump)
    f = pwl_from_json(dump["breakpoints"])
    q = args.query
    try:
        if q == "eval":
            print(rat_str(f.value_at(rat(args.args[0]))))
        elif q == "measure":
            s = set_from_json(json.loads(args.args[0]))
            print(rat_str(f.image(s).measure()))
        elif q == "image":
            s = set_from_json(json.loads(args.args[0]))
            print(str(f.image(s)))
        elif q == "preimage":
            s = set_from_json(json.loads(args.args[0]))
            print(str(f.preimage(s)))
        elif q == "variation":
            print(rat_str(f.variation(rat(args.args[0]))))
        elif q == "2L":
            res = check_2L(f, rat(args.args[0]), rat(args.args[1]))
            print(f"true x={rat_str(res.witness)}" if res.holds else "false")
        elif q == "bilipschitz":
            ok = check_bilipschitz(f, rat(args.args[0]), rat(args.args[1]), rat(args.args[2]))
            print("true" if ok else "false")
        else:
            print(f"unknown query: {q}", file=sys.stderr)
            return 2
    except IndexError:
        print(f"query {q}: missing arguments", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"query {q}: bad set argument: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
