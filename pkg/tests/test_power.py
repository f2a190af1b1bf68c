"""Rejection rates against the exact finite-sample power of the pooled t-test.

The oracle's normal-approximation power runs a few tenths of a point below
the t-test's true power at n = 500 per arm. Enumerating the two independent
binomial arm counts gives the exact rate to compare the simulation against.
"""

import numpy as np
import pytest
from conftest import simulate_preset
from scipy import stats

from estimandsim.oracle import summarize_population
from estimandsim.presets import get_preset


def exact_rejection(p_t, p_c, m, alpha):
    k = np.arange(m + 1)
    w = np.outer(stats.binom.pmf(k, m, p_t), stats.binom.pmf(k, m, p_c))
    a, b = k[:, None] / m, k[None, :] / m
    se = np.sqrt((a * (1 - a) + b * (1 - b)) / (m - 1))
    with np.errstate(divide="ignore", invalid="ignore"):
        p = 2 * stats.t.sf(np.abs(a - b) / se, 2 * m - 2)
    p = np.where(se == 0, np.where(a == b, 1.0, 0.0), p)
    return float((w * (p < alpha)).sum())


@pytest.mark.slow
@pytest.mark.parametrize("name", ["scenario1-independence", "scenario2-independence", "scenario1-calibrated",
                                  "scenario2-calibrated", "no-defect"])
def test_rejection_matches_exact_power(name):
    cfg = get_preset(name)
    o = summarize_population(cfg)
    exact = exact_rejection(o.p_event_treat, o.p_event_control, cfg.n // 2, cfg.alpha)
    assert exact >= o.asymptotic_rejection - 1e-3
    _, s = simulate_preset(name)
    assert abs(s.rejection_fraction - exact) <= 3 * s.mcse_rej
