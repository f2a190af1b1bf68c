"""Domain types: arms, intercurrent events, estimand definitions, scenarios."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .errors import (
    DuplicateArmId,
    DuplicateCategoryId,
    InvalidArms,
    InvalidWindow,
    OddSampleSize,
    PeriodProbabilitiesExceedOne,
    ProbabilityOutOfRange,
    TooFewArms,
    UnknownArmReference,
    ValidationError,
)

UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class ArmDefinition:
    id: str
    label: str
    # months; optional for estimand arms whose contrast is not about duration
    treatment_duration: Optional[int] = None


@dataclass(frozen=True)
class Window:
    """Half-open interval ``[start, end)``; ``end=None`` means unbounded."""

    start: float
    end: Optional[float] = None


@dataclass(frozen=True)
class IntercurrentEventCategory:
    id: str
    description: str
    applicable_arms: frozenset[str]
    window: Optional[Window] = None


class StrategyKind(enum.Enum):
    COMPOSITE = "composite"
    WHILE_ON_TREATMENT = "while_on_treatment"
    OTHER = "other"


@dataclass(frozen=True)
class Strategy:
    kind: StrategyKind
    # free text for OTHER, e.g. "hypothetical"
    detail: str = ""

    @classmethod
    def composite(cls) -> "Strategy":
        return cls(StrategyKind.COMPOSITE)

    @classmethod
    def while_on_treatment(cls) -> "Strategy":
        return cls(StrategyKind.WHILE_ON_TREATMENT)

    @classmethod
    def other(cls, detail: str) -> "Strategy":
        return cls(StrategyKind.OTHER, detail)

    @property
    def assessable(self) -> bool:
        return self.kind is not StrategyKind.OTHER

    def __str__(self) -> str:
        if self.kind is StrategyKind.OTHER:
            return f"other ({self.detail})" if self.detail else "other"
        return self.kind.value.replace("_", "-")


@dataclass(frozen=True)
class IntercurrentEvent:
    name: str
    categories: tuple[IntercurrentEventCategory, ...]
    strategy: Strategy
    # Short noun phrase ("stopping treatment"). When set and the categories
    # carry windows, contiguous windows are rendered as one merged clause.
    description: Optional[str] = None
    window_unit: str = "months"


@dataclass(frozen=True)
class EstimandSpec:
    arms: tuple[ArmDefinition, ...]
    endpoint: str
    events: tuple[IntercurrentEvent, ...] = ()
    name: str = ""

    @property
    def arm_ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.arms)


class ExcessTiming(enum.Enum):
    AFTER_MONTH_6 = "after_month_6"


def _default_arms() -> tuple[ArmDefinition, ArmDefinition]:
    return (
        ArmDefinition("6m", "6-month regimen", 6),
        ArmDefinition("12m", "12-month regimen", 12),
    )


@dataclass(frozen=True)
class ScenarioConfig:
    """Parameters of the two-arm duration trial.

    The treated arm (Z=1) is the shorter regimen and the control arm (Z=0)
    the longer one; ``arms`` may be given in either order. ``q612`` is
    P(adverse clinical outcome | discontinued in months 6-12) under control,
    and equals ``p_ya_control`` when the two components are independent.
    """

    n: int
    p_ya_control: float
    p_ya_treat: float
    p_disc_first: float
    p_disc_second: float
    q612: float
    alpha: float = 0.05
    n_reps: int = 10_000
    seed: int = 20240214
    arms: tuple[ArmDefinition, ArmDefinition] = field(default_factory=_default_arms)
    p_ya_excess_timing: ExcessTiming = ExcessTiming.AFTER_MONTH_6
    pooled_variance: bool = True

    @property
    def treated_arm(self) -> ArmDefinition:
        return min(self.arms, key=lambda a: a.treatment_duration)

    @property
    def control_arm(self) -> ArmDefinition:
        return max(self.arms, key=lambda a: a.treatment_duration)

    @property
    def p_disc_none(self) -> float:
        return 1.0 - self.p_disc_first - self.p_disc_second


def _check_probability(name: str, value) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProbabilityOutOfRange(name, f"expected a number, got {value!r}")
    if not (0.0 <= value <= 1.0):
        raise ProbabilityOutOfRange(name, f"{value!r} is outside [0, 1]")


def _check_int(name: str, value, minimum: int, maximum: Optional[int] = None) -> None:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(name, f"expected an integer, got {value!r}")
    if value < minimum or (maximum is not None and value > maximum):
        raise ValidationError(name, f"{value!r} is out of range")


def _check_arm(arm: ArmDefinition, where: str, duration_required: bool) -> None:
    if not isinstance(arm.id, str) or not arm.id:
        raise InvalidArms(f"{where}.id", "arm id must be a non-empty string")
    d = arm.treatment_duration
    if d is None and not duration_required:
        return
    if isinstance(d, bool) or not isinstance(d, int) or d <= 0:
        raise InvalidArms(f"{where}.treatment_duration", f"must be a positive integer, got {d!r}")


def validate_scenario(config: ScenarioConfig) -> ScenarioConfig:
    """Return ``config`` unchanged if it is a well-formed scenario, else raise."""
    _check_int("n", config.n, 2)
    if config.n % 2:
        raise OddSampleSize("n", f"{config.n} cannot be split 1:1")
    for name in ("p_ya_control", "p_ya_treat", "p_disc_first", "p_disc_second", "q612"):
        _check_probability(name, getattr(config, name))
    if config.p_disc_first + config.p_disc_second > 1.0 + 1e-12:
        raise PeriodProbabilitiesExceedOne(
            "p_disc_second",
            f"p_disc_first + p_disc_second = {config.p_disc_first + config.p_disc_second:g} > 1",
        )
    _check_probability("alpha", config.alpha)
    if not 0.0 < config.alpha < 1.0:
        raise ProbabilityOutOfRange("alpha", f"{config.alpha!r} must lie strictly inside (0, 1)")
    _check_int("n_reps", config.n_reps, 1)
    _check_int("seed", config.seed, 0, UINT64_MAX)
    if len(config.arms) != 2:
        raise InvalidArms("arms", f"a scenario has exactly two arms, got {len(config.arms)}")
    for i, arm in enumerate(config.arms):
        _check_arm(arm, f"arms[{i}]", duration_required=True)
    a, b = config.arms
    if a.id == b.id:
        raise DuplicateArmId("arms", f"duplicate arm id {a.id!r}")
    if a.treatment_duration == b.treatment_duration:
        raise InvalidArms("arms", "arms must differ in treatment_duration")
    if not isinstance(config.p_ya_excess_timing, ExcessTiming):
        raise ValidationError("p_ya_excess_timing", f"unsupported value {config.p_ya_excess_timing!r}")
    if not isinstance(config.pooled_variance, bool):
        raise ValidationError("pooled_variance", "expected a boolean")
    return config


def validate_estimand(spec: EstimandSpec) -> EstimandSpec:
    """Structural checks: at least two arms, unique ids, resolvable arm references."""
    if len(spec.arms) < 2:
        raise TooFewArms("arms", f"an estimand compares at least two arms, got {len(spec.arms)}")
    seen: set[str] = set()
    for i, arm in enumerate(spec.arms):
        _check_arm(arm, f"arms[{i}]", duration_required=False)
        if arm.id in seen:
            raise DuplicateArmId(f"arms[{i}].id", f"duplicate arm id {arm.id!r}")
        seen.add(arm.id)
    for e, event in enumerate(spec.events):
        ids: set[str] = set()
        for c, cat in enumerate(event.categories):
            where = f"events[{e}].categories[{c}]"
            if cat.id in ids:
                raise DuplicateCategoryId(f"{where}.id", f"duplicate category id {cat.id!r} in event {event.name!r}")
            ids.add(cat.id)
            if not cat.applicable_arms:
                raise UnknownArmReference(f"{where}.applicable_arms", "must name at least one arm")
            unknown = sorted(set(cat.applicable_arms) - seen)
            if unknown:
                raise UnknownArmReference(f"{where}.applicable_arms", f"undeclared arm(s) {', '.join(unknown)}")
            w = cat.window
            if w is not None and not (0 <= w.start and (w.end is None or w.start < w.end)):
                raise InvalidWindow(f"{where}.window", f"need 0 <= start < end, got [{w.start}, {w.end})")
    return spec
