"""Named scenario configurations.

``*-independence`` presets draw the clinical outcome independently of
discontinuation (q612 = p_ya_control). ``*-calibrated`` presets set
q612 = 1/3, which yields a true risk difference of -0.10 and 50 expected
excess events in scenario 1. ``no-defect`` removes the long-arm-only
discontinuation window, so both arms share one outcome definition.
"""

from __future__ import annotations

from .errors import UnknownPreset
from .model import ScenarioConfig

DEFAULT_SEED = 20240214

CALIBRATED_Q612 = 1.0 / 3.0


def _scenario(p_ya_treat: float, q612: float, p_disc_second: float = 0.15) -> ScenarioConfig:
    return ScenarioConfig(
        n=1000,
        p_ya_control=0.4,
        p_ya_treat=p_ya_treat,
        p_disc_first=0.15,
        p_disc_second=p_disc_second,
        q612=q612,
        alpha=0.05,
        n_reps=10_000,
        seed=DEFAULT_SEED,
    )


PRESETS: dict[str, ScenarioConfig] = {
    "scenario1-independence": _scenario(0.4, 0.4),
    "scenario2-independence": _scenario(0.5, 0.4),
    "scenario1-calibrated": _scenario(0.4, CALIBRATED_Q612),
    "scenario2-calibrated": _scenario(0.5, CALIBRATED_Q612),
    "no-defect": _scenario(0.4, 0.4, p_disc_second=0.0),
}


def get_preset(name: str) -> ScenarioConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPreset(name, PRESETS) from None
