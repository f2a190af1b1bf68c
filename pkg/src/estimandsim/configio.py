"""JSON ingestion and emission for scenario configs and estimand definitions.

Parsing is strict: unknown keys are rejected by name so a misspelt field
cannot silently fall back to a default. See docs/schemas.md.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

from .errors import ConfigFileNotFound, MalformedJson, SchemaViolation, ValidationError
from .model import (
    ArmDefinition,
    EstimandSpec,
    ExcessTiming,
    IntercurrentEvent,
    IntercurrentEventCategory,
    ScenarioConfig,
    Strategy,
    StrategyKind,
    Window,
    validate_estimand,
    validate_scenario,
)

SCENARIO_REQUIRED = ("n", "p_ya_control", "p_ya_treat", "p_disc_first", "p_disc_second")
SCENARIO_OPTIONAL = ("q612", "alpha", "n_reps", "seed", "arms", "p_ya_excess_timing", "pooled_variance")
_FLOAT_FIELDS = ("p_ya_control", "p_ya_treat", "p_disc_first", "p_disc_second", "q612", "alpha")


def load_json(path: Union[str, Path]) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigFileNotFound(f"no such file: {path}") from None
    except UnicodeDecodeError as exc:
        raise MalformedJson(str(path), 1, 1, f"not UTF-8: {exc.reason}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedJson(str(path), exc.lineno, exc.colno, exc.msg) from None


def _check_keys(data: Any, where: str, required, optional=()) -> None:
    if not isinstance(data, dict):
        raise SchemaViolation(where or "<root>", f"expected an object, got {type(data).__name__}")
    prefix = f"{where}." if where else ""
    for key in data:
        if key not in required and key not in optional:
            raise SchemaViolation(prefix + key, "unknown key")
    for key in required:
        if key not in data:
            raise SchemaViolation(prefix + key, "missing required key")


def _expect(value, types, key: str, what: str):
    if isinstance(value, bool) and bool not in types:
        raise SchemaViolation(key, f"expected {what}, got {value!r}")
    if not isinstance(value, types):
        raise SchemaViolation(key, f"expected {what}, got {value!r}")
    return value


def _arm_from_dict(data, where: str, duration_required: bool) -> ArmDefinition:
    required = ("id", "label", "treatment_duration") if duration_required else ("id", "label")
    optional = () if duration_required else ("treatment_duration",)
    _check_keys(data, where, required, optional)
    return ArmDefinition(
        id=_expect(data["id"], (str,), f"{where}.id", "a string"),
        label=_expect(data["label"], (str,), f"{where}.label", "a string"),
        treatment_duration=data.get("treatment_duration"),
    )


def scenario_from_dict(data: dict) -> ScenarioConfig:
    _check_keys(data, "", SCENARIO_REQUIRED, SCENARIO_OPTIONAL)
    kwargs: dict[str, Any] = {}
    for key in SCENARIO_REQUIRED + SCENARIO_OPTIONAL:
        if key not in data:
            continue
        value = data[key]
        if key in _FLOAT_FIELDS:
            kwargs[key] = float(_expect(value, (int, float), key, "a number"))
        elif key in ("n", "n_reps", "seed"):
            kwargs[key] = _expect(value, (int,), key, "an integer")
        elif key == "arms":
            _expect(value, (list,), key, "a list of two arms")
            kwargs[key] = tuple(_arm_from_dict(a, f"arms[{i}]", True) for i, a in enumerate(value))
        elif key == "p_ya_excess_timing":
            try:
                kwargs[key] = ExcessTiming(value)
            except ValueError:
                raise SchemaViolation(key, f"unsupported value {value!r}") from None
        elif key == "pooled_variance":
            kwargs[key] = _expect(value, (bool,), key, "a boolean")
    kwargs.setdefault("q612", kwargs["p_ya_control"])
    config = ScenarioConfig(**kwargs)
    try:
        return validate_scenario(config)
    except ValidationError as exc:
        raise SchemaViolation(exc.field, exc.message) from None


def scenario_to_dict(config: ScenarioConfig) -> dict:
    return {
        "n": config.n,
        "arms": [
            {"id": a.id, "label": a.label, "treatment_duration": a.treatment_duration}
            for a in config.arms
        ],
        "p_ya_control": config.p_ya_control,
        "p_ya_treat": config.p_ya_treat,
        "p_ya_excess_timing": config.p_ya_excess_timing.value,
        "p_disc_first": config.p_disc_first,
        "p_disc_second": config.p_disc_second,
        "q612": config.q612,
        "alpha": config.alpha,
        "n_reps": config.n_reps,
        "seed": config.seed,
        "pooled_variance": config.pooled_variance,
    }


def parse_strategy(text: Any, key: str) -> Strategy:
    _expect(text, (str,), key, 'a strategy string ("composite", "while_on_treatment" or "other:<name>")')
    if text == StrategyKind.COMPOSITE.value:
        return Strategy.composite()
    if text == StrategyKind.WHILE_ON_TREATMENT.value:
        return Strategy.while_on_treatment()
    if text == "other" or text.startswith("other:"):
        return Strategy.other(text.partition(":")[2].strip())
    raise SchemaViolation(key, f"unknown strategy {text!r}")


def _strategy_to_str(strategy: Strategy) -> str:
    if strategy.kind is StrategyKind.OTHER:
        return f"other:{strategy.detail}" if strategy.detail else "other"
    return strategy.kind.value


def _window_from_json(value, key: str) -> Window:
    if not isinstance(value, list) or len(value) != 2:
        raise SchemaViolation(key, "expected [start, end] with end possibly null")
    start, end = value
    _expect(start, (int, float), key, "a numeric window start")
    if end is not None:
        _expect(end, (int, float), key, "a numeric window end or null")
    return Window(float(start), None if end is None else float(end))


def estimand_from_dict(data: dict) -> EstimandSpec:
    _check_keys(data, "", ("arms", "endpoint"), ("events", "name"))
    _expect(data["arms"], (list,), "arms", "a list of arms")
    arms = tuple(_arm_from_dict(a, f"arms[{i}]", False) for i, a in enumerate(data["arms"]))
    events = []
    for e, ev in enumerate(_expect(data.get("events", []), (list,), "events", "a list of events")):
        where = f"events[{e}]"
        _check_keys(ev, where, ("name", "strategy", "categories"), ("description", "window_unit"))
        cats = []
        for c, cat in enumerate(_expect(ev["categories"], (list,), f"{where}.categories", "a list")):
            cw = f"{where}.categories[{c}]"
            _check_keys(cat, cw, ("id", "description", "applicable_arms"), ("window",))
            applicable = _expect(cat["applicable_arms"], (list,), f"{cw}.applicable_arms", "a list of arm ids")
            cats.append(IntercurrentEventCategory(
                id=_expect(cat["id"], (str,), f"{cw}.id", "a string"),
                description=_expect(cat["description"], (str,), f"{cw}.description", "a string"),
                applicable_arms=frozenset(applicable),
                window=_window_from_json(cat["window"], f"{cw}.window") if cat.get("window") is not None else None,
            ))
        events.append(IntercurrentEvent(
            name=_expect(ev["name"], (str,), f"{where}.name", "a string"),
            categories=tuple(cats),
            strategy=parse_strategy(ev["strategy"], f"{where}.strategy"),
            description=ev.get("description"),
            window_unit=ev.get("window_unit", "months"),
        ))
    spec = EstimandSpec(
        arms=arms,
        endpoint=_expect(data["endpoint"], (str,), "endpoint", "a string"),
        events=tuple(events),
        name=data.get("name", ""),
    )
    try:
        return validate_estimand(spec)
    except ValidationError as exc:
        raise SchemaViolation(exc.field, exc.message) from None


def estimand_to_dict(spec: EstimandSpec) -> dict:
    def arm(a: ArmDefinition) -> dict:
        out = {"id": a.id, "label": a.label}
        if a.treatment_duration is not None:
            out["treatment_duration"] = a.treatment_duration
        return out

    def category(c: IntercurrentEventCategory, arm_order) -> dict:
        out = {
            "id": c.id,
            "description": c.description,
            "applicable_arms": [a for a in arm_order if a in c.applicable_arms],
        }
        if c.window is not None:
            out["window"] = [c.window.start, c.window.end]
        return out

    events = []
    for ev in spec.events:
        out = {
            "name": ev.name,
            "strategy": _strategy_to_str(ev.strategy),
            "categories": [category(c, spec.arm_ids) for c in ev.categories],
        }
        if ev.description is not None:
            out["description"] = ev.description
        if ev.description is not None or ev.window_unit != "months":
            out["window_unit"] = ev.window_unit
        events.append(out)
    doc = {"arms": [arm(a) for a in spec.arms], "endpoint": spec.endpoint, "events": events}
    if spec.name:
        doc["name"] = spec.name
    return doc


def load_scenario(path) -> ScenarioConfig:
    return scenario_from_dict(load_json(path))


def load_estimand(path) -> EstimandSpec:
    return estimand_from_dict(load_json(path))


def parse_config(path) -> Union[ScenarioConfig, EstimandSpec]:
    """Load either document type, telling them apart by their keys."""
    data = load_json(path)
    if isinstance(data, dict) and "endpoint" in data:
        return estimand_from_dict(data)
    return scenario_from_dict(data)
