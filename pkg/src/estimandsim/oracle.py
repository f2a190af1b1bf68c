"""Exact population quantities by enumerating the joint law of (Y_a, discontinuation).

Written against the joint masses directly rather than the sampler's
conditional probabilities, so agreement with the Monte Carlo engine is a
genuine cross-check.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

from .dgm import DiscCategory
from .errors import MarginalInfeasible
from .model import ScenarioConfig
from .statcore import normal_cdf, normal_quantile

Atom = tuple[int, DiscCategory]

_EPS = 1e-12


def _control_law(config: ScenarioConfig) -> dict[Atom, float]:
    p1, p2 = config.p_disc_first, config.p_disc_second
    p0 = 1.0 - p1 - p2
    mass_ya_late = config.q612 * p2
    rest = config.p_ya_control - mass_ya_late  # P(ya=1, not late)
    if rest < -_EPS:
        raise MarginalInfeasible("q612", f"q612 * p_disc_second exceeds p_ya_control by {-rest:g}")
    rest = max(rest, 0.0)
    early_or_none = p0 + p1
    if early_or_none <= 0.0:
        if rest > _EPS:
            raise MarginalInfeasible("q612", "with p_disc_second = 1, q612 must equal p_ya_control")
        share = 0.0
    else:
        share = rest / early_or_none
        if share > 1.0 + _EPS:
            raise MarginalInfeasible("q612", "clinical mass outside late discontinuers exceeds their share")
        share = min(share, 1.0)
    return {
        (1, DiscCategory.NONE): share * p0,
        (0, DiscCategory.NONE): (1.0 - share) * p0,
        (1, DiscCategory.FIRST): share * p1,
        (0, DiscCategory.FIRST): (1.0 - share) * p1,
        (1, DiscCategory.SECOND): mass_ya_late,
        (0, DiscCategory.SECOND): p2 - mass_ya_late,
    }


def _treat_law(config: ScenarioConfig, control: dict[Atom, float]) -> dict[Atom, float]:
    pc, pt = config.p_ya_control, config.p_ya_treat
    law: dict[Atom, float] = {}
    for (ya, disc), mass in control.items():
        # the short arm cannot discontinue in months 6-12
        d = DiscCategory.NONE if disc is DiscCategory.SECOND else disc
        if pt > pc:
            flip_up = (pt - pc) / (1.0 - pc)
            moves = {1: mass} if ya else {1: mass * flip_up, 0: mass * (1.0 - flip_up)}
        elif pt < pc:
            keep = pt / pc
            moves = {1: mass * keep, 0: mass * (1.0 - keep)} if ya else {0: mass}
        else:
            moves = {ya: mass}
        for y, m in moves.items():
            law[(y, d)] = law.get((y, d), 0.0) + m
    return law


def joint_distribution(config: ScenarioConfig) -> dict[int, list[tuple[Atom, float]]]:
    """Atoms ``(ya, disc_category)`` with positive mass, keyed by arm (1 short, 0 long)."""
    control = _control_law(config)
    treat = _treat_law(config, control)

    def atoms(law):
        return [(atom, m) for atom, m in sorted(law.items(), key=lambda kv: (kv[0][1], kv[0][0])) if m > 0.0]

    return {1: atoms(treat), 0: atoms(control)}


@dataclass(frozen=True)
class OracleSummary:
    p_event_treat: float
    p_event_control: float
    true_rd: float
    expected_excess: float
    asymptotic_rejection: float
    n_per_arm: int
    alpha: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _favourable(atoms) -> float:
    return math.fsum(m for (ya, disc), m in atoms if ya == 0 and disc is DiscCategory.NONE)


def asymptotic_power(p_treat: float, p_control: float, n_per_arm: int, alpha: float) -> float:
    """Normal-approximation power of the two-sided level-``alpha`` test of equal risks."""
    z = normal_quantile(1.0 - alpha / 2.0)
    se = ((p_treat * (1 - p_treat) + p_control * (1 - p_control)) / n_per_arm) ** 0.5
    theta = p_treat - p_control
    if se == 0.0:
        return 0.0 if theta == 0.0 else 1.0
    return normal_cdf(-z - theta / se) + normal_cdf(-z + theta / se)


def summarize_population(config: ScenarioConfig) -> OracleSummary:
    law = joint_distribution(config)
    p_t = 1.0 - _favourable(law[1])
    p_c = 1.0 - _favourable(law[0])
    n_arm = config.n // 2
    excess_prob = math.fsum(m for (ya, disc), m in law[0] if ya == 0 and disc is DiscCategory.SECOND)
    return OracleSummary(
        p_event_treat=p_t,
        p_event_control=p_c,
        true_rd=p_t - p_c,
        expected_excess=n_arm * excess_prob,
        asymptotic_rejection=asymptotic_power(p_t, p_c, n_arm, config.alpha),
        n_per_arm=n_arm,
        alpha=config.alpha,
    )
