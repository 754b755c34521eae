"""JSON forms for every value the tool reads or writes.

Rationals serialize as decimal-free "p/q" strings, an interval as a
two-element array of them, an interval set as an array of intervals, a
function as an array of [x, y] pairs. Serialization is deterministic, so a
dump, reloaded and dumped again, reproduces the bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from ._rat import rat, rat_str
from .intervals import Error, Interval, IntervalSet, ivl, normalize
from .pwl import PWL
from .zigzag import FamilyScript


class ScenarioError(Error):
    """Malformed scenario or dump input; message carries the location."""


def rational_to_json(q) -> str:
    return rat_str(q)


def interval_to_json(iv: Interval) -> list:
    return [rat_str(iv.lo), rat_str(iv.hi)]


def interval_from_json(obj, where="interval") -> Interval:
    if not isinstance(obj, (list, tuple)) or len(obj) != 2:
        raise ScenarioError(f"{where}: expected a two-element array")
    try:
        return ivl(rat(obj[0]), rat(obj[1]))
    except (ValueError, ArithmeticError, Error) as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def set_to_json(s: IntervalSet) -> list:
    return [interval_to_json(p) for p in s.parts]


def set_from_json(obj, where="interval set") -> IntervalSet:
    if not isinstance(obj, list):
        raise ScenarioError(f"{where}: expected an array of intervals")
    return normalize([interval_from_json(o, f"{where}[{i}]") for i, o in enumerate(obj)])


def pwl_to_json(f: PWL) -> list:
    return [[rat_str(x), rat_str(y)] for x, y in f.breakpoints]


def pwl_from_json(obj, where="function") -> PWL:
    if not isinstance(obj, list) or len(obj) < 2:
        raise ScenarioError(f"{where}: expected an array of at least two [x, y] pairs")
    try:
        return PWL([(rat(x), rat(y)) for x, y in obj])
    except (ValueError, ArithmeticError, TypeError) as exc:
        raise ScenarioError(f"{where}: {exc}") from exc


def script_to_json(script: FamilyScript) -> dict:
    return {
        "epsilon": rat_str(script.epsilon),
        "ambient": interval_to_json(script.ambient),
        "levels": [[interval_to_json(iv) for iv in level] for level in script.levels],
    }


def script_from_json(obj, where="script") -> FamilyScript:
    if "levels" not in obj or "epsilon" not in obj:
        raise ScenarioError(f"{where}: needs 'epsilon' and 'levels'")
    try:
        eps = rat(obj["epsilon"])
    except (ValueError, ArithmeticError) as exc:
        raise ScenarioError(f"{where}.epsilon: {exc}") from exc
    ambient = (
        interval_from_json(obj["ambient"], f"{where}.ambient")
        if "ambient" in obj
        else ivl(0, 1)
    )
    levels = []
    for n, level in enumerate(obj["levels"]):
        levels.append(
            tuple(
                interval_from_json(o, f"{where}.levels[{n}][{k}]") for k, o in enumerate(level)
            )
        )
    return FamilyScript(levels=tuple(levels), epsilon=eps, ambient=ambient)


@dataclass(frozen=True)
class Scenario:
    kind: str  # zigzag | concentrate | priority
    payload: dict  # parsed, validated fields


def load_scenario(source) -> Scenario:
    """Parse and validate a scenario from a dict, JSON text, or file path."""
    if isinstance(source, dict):
        obj = source
    else:
        text = source
        if "\n" not in str(source) and not str(source).lstrip().startswith("{"):
            try:
                with open(source, "r", encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ScenarioError(f"cannot read scenario file: {exc}") from exc
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"scenario is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ScenarioError("scenario: top level must be an object with a 'kind'")
    kind = obj["kind"]
    if kind == "zigzag":
        return Scenario(kind, _parse_zigzag(obj))
    if kind == "concentrate":
        return Scenario(kind, _parse_concentrate(obj))
    if kind == "priority":
        return Scenario(kind, _parse_priority(obj))
    raise ScenarioError(f"scenario.kind: unknown kind {kind!r}")


def _parse_zigzag(obj) -> dict:
    from .scenarios import fat_cantor_default_K, fat_cantor_script

    if "generator" in obj:
        gen = obj["generator"]
        if gen.get("name") != "fat_cantor":
            raise ScenarioError(f"scenario.generator.name: unknown generator {gen.get('name')!r}")
        depth = int(gen.get("depth", 6))
        script = fat_cantor_script(depth, gen.get("epsilon", obj.get("epsilon", "1/4")))
        default_k = fat_cantor_default_K(depth)
    elif "levels" in obj:
        script = script_from_json(obj, "scenario")
        shortest = min(
            (iv.length for level in script.levels for iv in level if iv.length > 0),
            default=rat(1),
        )
        default_k = 1
        while rat(1, 2**default_k) >= shortest:
            default_k += 1
    else:
        raise ScenarioError("scenario: zigzag needs 'levels' or 'generator'")
    stages = int(obj.get("stages", script.depth))
    k = int(obj.get("K", default_k))
    corrupt = None
    if "corrupt" in obj:
        c = obj["corrupt"]
        try:
            corrupt = (int(c["level"]), int(c["k"]), int(c["b"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"scenario.corrupt: needs level, k, b ({exc})") from exc
    return {"script": script, "stages": stages, "K": k, "corrupt": corrupt}


def _parse_concentrate(obj) -> dict:
    if "targets" in obj:
        targets = [
            set_from_json(t, f"scenario.targets[{i}]") for i, t in enumerate(obj["targets"])
        ]
        stages = int(obj.get("stages", len(targets)))
        if stages > len(targets):
            raise ScenarioError("scenario.stages exceeds the number of targets")
    elif "repeat" in obj:
        one = set_from_json(obj["repeat"], "scenario.repeat")
        stages = int(obj.get("stages", 4))
        targets = [one] * stages
    else:
        raise ScenarioError("scenario: concentrate needs 'targets' or 'repeat'")
    return {"targets": targets, "stages": stages}


def _parse_priority(obj) -> dict:
    if "budgets" not in obj or "classes" not in obj:
        raise ScenarioError("scenario: priority needs 'budgets' and 'classes'")
    try:
        budgets = [rat(b) for b in obj["budgets"]]
    except (ValueError, ArithmeticError) as exc:
        raise ScenarioError(f"scenario.budgets: {exc}") from exc
    classes = obj["classes"]
    if len(classes) != len(budgets):
        raise ScenarioError("scenario.classes must match scenario.budgets in length")
    points = []
    schedules = []
    for i, c in enumerate(classes):
        if "point" in c:
            points.append(rat(c["point"]))
            schedules.append(None)
        elif "sets" in c:
            points.append(rat(0))
            schedules.append(
                [set_from_json(s, f"scenario.classes[{i}].sets[{j}]") for j, s in enumerate(c["sets"])]
            )
        else:
            raise ScenarioError(f"scenario.classes[{i}]: needs 'point' or 'sets'")
    stages = int(obj.get("stages", 20))
    return {"budgets": budgets, "points": points, "schedules": schedules, "stages": stages}


def dumps(obj) -> str:
    """Deterministic, diff-friendly JSON text."""
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def load_dump(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read dump: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"dump is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "breakpoints" not in obj:
        raise ScenarioError("dump: expected an object with 'breakpoints'")
    return obj
