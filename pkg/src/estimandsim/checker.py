"""Lint estimand definitions for arm-specific intercurrent-event categories.

A composite (or while-on-treatment) strategy folds the intercurrent event
into the outcome. If some category of that event can only happen in a
subset of arms, the arms end up comparing differently defined outcomes and
the contrast is no longer causal. The check is purely structural.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .model import EstimandSpec, IntercurrentEvent, IntercurrentEventCategory, StrategyKind, Window


class VerdictStatus(enum.Enum):
    CAUSAL = "causal"
    NON_CAUSAL = "non_causal"
    UNASSESSED = "unassessed"


@dataclass(frozen=True)
class Offender:
    event: str
    category: str
    missing_arms: tuple[str, ...]
    strategy: StrategyKind

    def message(self, spec: EstimandSpec) -> str:
        labels = {a.id: a.label or a.id for a in spec.arms}
        applies = [labels[a] for a in spec.arm_ids if a not in self.missing_arms]
        missing = [labels[a] for a in self.missing_arms]
        kind = self.strategy.value.replace("_", "-")
        return (
            f"{kind} strategy for '{self.event}': category '{self.category}' applies to "
            f"{', '.join(applies)} only (cannot occur under {', '.join(missing)})"
        )


@dataclass(frozen=True)
class Verdict:
    status: VerdictStatus
    offending: tuple[Offender, ...] = ()
    rendered_definitions: dict[str, str] = field(default_factory=dict)
    messages: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "offending": [
                {
                    "event": o.event,
                    "category": o.category,
                    "missing_arms": list(o.missing_arms),
                    "strategy": o.strategy.value,
                }
                for o in self.offending
            ],
            "rendered_definitions": dict(self.rendered_definitions),
            "messages": list(self.messages),
        }


def check_estimand(spec: EstimandSpec) -> Verdict:
    """Flag every category of an assessable event that is missing from some arm."""
    arm_ids = spec.arm_ids
    all_arms = frozenset(arm_ids)
    offending = []
    for event in spec.events:
        if not event.strategy.assessable:
            continue
        for cat in event.categories:
            if cat.applicable_arms < all_arms:
                missing = tuple(a for a in arm_ids if a not in cat.applicable_arms)
                offending.append(Offender(event.name, cat.id, missing, event.strategy.kind))

    if offending:
        status = VerdictStatus.NON_CAUSAL
    elif spec.events and not any(e.strategy.assessable for e in spec.events):
        status = VerdictStatus.UNASSESSED
    else:
        status = VerdictStatus.CAUSAL

    messages = [o.message(spec) for o in offending]
    skipped = [e.name for e in spec.events if not e.strategy.assessable]
    if skipped:
        messages.append(f"not assessed (strategy outside composite/while-on-treatment): {', '.join(skipped)}")
    return Verdict(status, tuple(offending), render_outcome_definitions(spec), tuple(messages))


def _fmt(x: float) -> str:
    return f"{x:g}"


def _merged_window(windows: list[Window]) -> Optional[Window]:
    """Union of the windows if they form one contiguous interval."""
    ordered = sorted(windows, key=lambda w: w.start)
    start, end = ordered[0].start, ordered[0].end
    for w in ordered[1:]:
        if end is None or w.start > end:
            return None
        end = None if w.end is None else max(end, w.end)
    return Window(start, end)


def _window_phrase(w: Window, unit: str) -> str:
    if w.end is None:
        return f"above {_fmt(w.start)} {unit}"
    if w.start == 0:
        return f"before {_fmt(w.end)} {unit}"
    return f"between {_fmt(w.start)} and {_fmt(w.end)} {unit}"


def _event_clauses(event: IntercurrentEvent, cats: list[IntercurrentEventCategory]) -> list[str]:
    if not cats:
        return []
    if event.description and all(c.window is not None for c in cats):
        merged = _merged_window([c.window for c in cats])
        if merged is not None and not (merged.start == 0 and merged.end is None):
            return [f"{event.description} {_window_phrase(merged, event.window_unit)}"]
    return [c.description for c in cats]


def render_outcome_definitions(spec: EstimandSpec) -> dict[str, str]:
    """The outcome each arm is actually assessed on once events are folded in.

    Only events handled by an outcome-modifying strategy contribute. For an
    event with a ``description`` whose applicable categories form one
    contiguous window, the window is stated once ("stopping treatment before
    12 months"); otherwise categories are listed in declaration order.
    """
    out = {}
    for arm in spec.arms:
        clauses = []
        for event in spec.events:
            if not event.strategy.assessable:
                continue
            cats = [c for c in event.categories if arm.id in c.applicable_arms]
            clauses.extend(_event_clauses(event, cats))
        out[arm.id] = ", or ".join([spec.endpoint] + clauses)
    return out
