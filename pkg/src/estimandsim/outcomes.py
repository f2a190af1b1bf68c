"""Composite outcome derivation, excess events and the component decomposition."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .dgm import Cohort, PatientRecord
from .errors import EmptyCohort

TREAT, CONTROL = 1, 0


@dataclass(frozen=True)
class ComponentBundle:
    ya: int
    yb_first: int
    yb_second: int


def components(patient: PatientRecord, z: int) -> ComponentBundle:
    """Components ``patient`` would exhibit if assigned arm ``z``."""
    return ComponentBundle(patient.ya(z), patient.yb_first(z), patient.yb_second(z))


def composite_outcome(bundle: ComponentBundle) -> int:
    # product form: overlapping components are never double counted
    return 1 - (1 - bundle.ya) * (1 - bundle.yb_first) * (1 - bundle.yb_second)


def excess_indicator(patient: PatientRecord) -> int:
    """1 when a long-arm patient is unfavourable only through a 6-12 month discontinuation."""
    if patient.assigned_arm != CONTROL:
        return 0
    b = components(patient, CONTROL)
    return int(b.ya == 0 and b.yb_first == 0 and b.yb_second == 1)


# Vectorised counterparts used by the simulation loop.

def potential_composites(cohort: Cohort) -> tuple[np.ndarray, np.ndarray]:
    """Composite outcome of every patient under (Z=1, Z=0)."""
    yb1 = cohort.yb_first()
    y_treat = 1 - (1 - cohort.ya_treat) * (1 - yb1)
    y_control = 1 - (1 - cohort.ya_control) * (1 - yb1) * (1 - cohort.yb_second_control())
    return y_treat.astype(np.int8), y_control.astype(np.int8)


def excess_mask(cohort: Cohort) -> np.ndarray:
    """Potential excess indicator under the long arm, ignoring assignment."""
    return (cohort.ya_control == 0) & (cohort.yb_first() == 0) & (cohort.yb_second_control() == 1)


def realized_outcomes(cohort: Cohort) -> tuple[np.ndarray, np.ndarray, int]:
    """Observed composites split by arm, plus the long-arm excess count."""
    y1, y0 = potential_composites(cohort)
    treated = cohort.assigned_arm == TREAT
    control = cohort.assigned_arm == CONTROL
    excess = int(np.count_nonzero(excess_mask(cohort) & control))
    return y1[treated], y0[control], excess


@dataclass(frozen=True)
class Decomposition:
    d_a: float
    d_b06: float
    m_b612: float
    composite_effect: float  # cohort mean of Y1 - Y0

    @property
    def implied_rd(self) -> float:
        return self.d_a + self.d_b06 - self.m_b612

    @property
    def implied_rd_gap(self) -> float:
        """How far the additive decomposition misses the actual composite effect."""
        return self.composite_effect - self.implied_rd

    def to_dict(self) -> dict:
        out = asdict(self)
        out["implied_rd_gap"] = self.implied_rd_gap
        return out


def _mean(values: np.ndarray) -> float:
    return math.fsum(values.tolist()) / len(values)


def decomposition_report(cohort: Cohort) -> Decomposition:
    """Cohort means of the causal contrasts and the long-arm-only term.

    Needs both potential-outcome sets, so it is only available on simulated
    cohorts.
    """
    if len(cohort) == 0:
        raise EmptyCohort("decomposition needs at least one patient")
    ya1 = cohort.ya_treat.astype(np.int64)
    ya0 = cohort.ya_control.astype(np.int64)
    y1, y0 = potential_composites(cohort)
    return Decomposition(
        d_a=_mean(ya1 - ya0),
        # the 0-6 month category is shared, so its contrast is 0 by construction
        d_b06=_mean(cohort.yb_first().astype(np.int64) - cohort.yb_first().astype(np.int64)),
        m_b612=_mean(cohort.yb_second_control().astype(np.int64)),
        composite_effect=_mean(y1.astype(np.int64) - y0.astype(np.int64)),
    )
