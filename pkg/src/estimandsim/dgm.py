"""Data-generating mechanism for the 6- vs 12-month duration trial.

Each patient carries potential outcomes under both arms. Discontinuation
behaviour is a single latent category shared across arms; under the short
arm a month 6-12 discontinuation cannot happen, so it simply vanishes.
The clinical outcomes are monotonically coupled across arms.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .errors import MarginalInfeasible, OddCohortSize
from .model import ScenarioConfig

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15

UNASSIGNED = -1


class DiscCategory(enum.IntEnum):
    NONE = 0
    FIRST = 1  # months 0-6, possible under both arms
    SECOND = 2  # months 6-12, long arm only


def splitmix64(x: int) -> int:
    """SplitMix64 output function applied to ``x`` (a bijection on 64 bits)."""
    z = (x + _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix64(seed: int, stream: int) -> int:
    """Derive the substream seed for ``stream`` from a 64-bit master seed.

    ``splitmix64(seed XOR splitmix64(stream))``: injective in ``stream`` for a
    fixed ``seed``, so distinct replications never share a stream.
    """
    return splitmix64((seed & _MASK64) ^ splitmix64(stream & _MASK64))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


@dataclass(frozen=True)
class PatientRecord:
    id: int
    ya_control: int
    ya_treat: int
    disc_category: DiscCategory
    assigned_arm: Optional[int] = None  # Z: 1 short arm, 0 long arm

    def yb_first(self, z: int) -> int:
        return int(self.disc_category is DiscCategory.FIRST)

    def yb_second(self, z: int) -> int:
        if z == 1:
            return 0
        return int(self.disc_category is DiscCategory.SECOND)

    def ya(self, z: int) -> int:
        return self.ya_treat if z == 1 else self.ya_control


@dataclass(frozen=True)
class Cohort:
    """Column-oriented cohort. ``assigned_arm`` is -1 until randomised."""

    ya_control: np.ndarray
    ya_treat: np.ndarray
    disc_category: np.ndarray
    assigned_arm: np.ndarray

    def __len__(self) -> int:
        return len(self.ya_control)

    def __getitem__(self, i: int) -> PatientRecord:
        z = int(self.assigned_arm[i])
        return PatientRecord(
            id=int(i),
            ya_control=int(self.ya_control[i]),
            ya_treat=int(self.ya_treat[i]),
            disc_category=DiscCategory(int(self.disc_category[i])),
            assigned_arm=None if z == UNASSIGNED else z,
        )

    def __iter__(self) -> Iterator[PatientRecord]:
        return (self[i] for i in range(len(self)))

    @property
    def is_assigned(self) -> bool:
        return len(self) > 0 and bool(np.all(self.assigned_arm != UNASSIGNED))

    def yb_first(self) -> np.ndarray:
        return (self.disc_category == DiscCategory.FIRST).astype(np.int8)

    def yb_second_control(self) -> np.ndarray:
        return (self.disc_category == DiscCategory.SECOND).astype(np.int8)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["id", "ya_control", "ya_treat", "disc_category", "assigned_arm"])
            for p in self:
                writer.writerow([
                    p.id, p.ya_control, p.ya_treat, p.disc_category.name.lower(),
                    "" if p.assigned_arm is None else p.assigned_arm,
                ])

    @classmethod
    def from_records(cls, records) -> "Cohort":
        records = list(records)
        return cls(
            ya_control=np.array([r.ya_control for r in records], dtype=np.int8),
            ya_treat=np.array([r.ya_treat for r in records], dtype=np.int8),
            disc_category=np.array([int(r.disc_category) for r in records], dtype=np.int8),
            assigned_arm=np.array(
                [UNASSIGNED if r.assigned_arm is None else r.assigned_arm for r in records],
                dtype=np.int8,
            ),
        )


def clinical_law(config: ScenarioConfig) -> tuple[float, float, float, float]:
    """Sampling probabilities for the clinical component.

    Returns ``(p_given_second, p_given_other, p_extra, p_keep)``:
    P(ya_control=1 | disc=SECOND), P(ya_control=1 | disc!=SECOND), and the
    coupling probabilities used to build ``ya_treat`` from ``ya_control``
    (add events with ``p_extra`` when treatment is harmful, retain events
    with ``p_keep`` when it is protective).
    """
    p2 = config.p_disc_second
    pc = config.p_ya_control
    mass_second = config.q612 * p2
    if mass_second > pc + 1e-12:
        raise MarginalInfeasible(
            "q612",
            f"q612 * p_disc_second = {mass_second:g} exceeds p_ya_control = {pc:g}",
        )
    if p2 >= 1.0:
        if abs(config.q612 - pc) > 1e-12:
            raise MarginalInfeasible("q612", "with p_disc_second = 1, q612 must equal p_ya_control")
        p_other = pc
    else:
        p_other = (pc - mass_second) / (1.0 - p2)
        if p_other > 1.0 + 1e-12:
            raise MarginalInfeasible(
                "q612",
                f"remaining clinical mass needs P(ya=1 | not late discontinuation) = {p_other:g} > 1",
            )
        p_other = min(max(p_other, 0.0), 1.0)

    pt = config.p_ya_treat
    p_extra, p_keep = 0.0, 1.0
    if pt > pc:
        p_extra = (pt - pc) / (1.0 - pc)
    elif pt < pc:
        p_keep = pt / pc
    return config.q612, p_other, p_extra, p_keep


def generate_cohort(config: ScenarioConfig, seed: int) -> Cohort:
    """Draw ``config.n`` patients with coupled potential outcomes.

    Deterministic in ``(config, seed)``. The number and order of draws never
    depends on parameter values, so a given seed stays aligned across
    scenarios.
    """
    p_second, p_other, p_extra, p_keep = clinical_law(config)
    rng = make_rng(seed)
    n = config.n

    u_disc = rng.random(n)
    disc = np.zeros(n, dtype=np.int8)
    disc[u_disc < config.p_disc_first] = DiscCategory.FIRST
    late = (u_disc >= config.p_disc_first) & (u_disc < config.p_disc_first + config.p_disc_second)
    disc[late] = DiscCategory.SECOND

    p_ya = np.where(disc == DiscCategory.SECOND, p_second, p_other)
    ya_control = (rng.random(n) < p_ya).astype(np.int8)

    u_couple = rng.random(n)
    if p_extra > 0.0:
        ya_treat = (ya_control | (u_couple < p_extra)).astype(np.int8)
    elif p_keep < 1.0:
        ya_treat = (ya_control & (u_couple < p_keep)).astype(np.int8)
    else:
        ya_treat = ya_control.copy()

    return Cohort(
        ya_control=ya_control,
        ya_treat=ya_treat,
        disc_category=disc,
        assigned_arm=np.full(n, UNASSIGNED, dtype=np.int8),
    )


def assign_arms(cohort: Cohort, seed: int) -> Cohort:
    """Block randomisation: a uniform permutation, first half to Z=1."""
    n = len(cohort)
    if n == 0 or n % 2:
        raise OddCohortSize(f"cohort of {n} patients cannot be split 1:1")
    order = make_rng(seed).permutation(n)
    z = np.zeros(n, dtype=np.int8)
    z[order[: n // 2]] = 1
    return Cohort(cohort.ya_control, cohort.ya_treat, cohort.disc_category, z)
