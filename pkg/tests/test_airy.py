"""Airy evaluation layer: values, scaled arithmetic, zeros, range policy."""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gravpipe.airy import (
    AiryRangeError,
    ai_negative_zeros,
    airy_eval,
    airy_eval_scaled,
    growth_exponent,
    wkb_zero_estimate,
)
from oracles import ai_zero_mp, airy_mp, airy_series, wkb_eigenvalue


def _quartet(pair):
    return (pair.ai, pair.aip, pair.bi, pair.bip)


# ---------------------------------------------------------------------------
# values against the independent power series
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("z", [
    -6.0, -2.34, -1.0, 0.0, 0.5, 2.0, 5.0,
    1.0 + 1.0j, -2.0 + 0.5j, 3.0 - 2.0j, -4.0 - 1.0j, 0.3j,
])
def test_airy_eval_matches_series(z):
    got = _quartet(airy_eval(z))
    want = airy_series(z)
    scale = max(1.0, *(abs(complex(w)) for w in want))
    for g, w in zip(got, want):
        assert abs(complex(g) - complex(w)) < 5e-12 * scale


def test_airy_eval_real_axis_stays_real():
    for x in (-5.0, -0.7, 0.0, 1.3, 6.0):
        pair = airy_eval(x)
        assert all(v.imag == 0.0 for v in _quartet(pair))


@settings(max_examples=120, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 2.0 * math.pi))
def test_airy_eval_matches_series_on_disk(u, theta):
    # Uniform over the disk |z| <= 5.5, inside the series' validated range.
    z = 5.5 * math.sqrt(u) * cmath.exp(1j * theta)
    got = _quartet(airy_eval(z))
    want = airy_series(z)
    scale = max(1.0, *(abs(complex(w)) for w in want))
    for g, w in zip(got, want):
        assert abs(complex(g) - complex(w)) < 1e-10 * scale


def test_wronskian_method():
    for z in (-3.0, 0.2, 2.5, 1.0 + 2.0j, -4.0 + 1.5j):
        assert airy_eval(z).wronskian() == pytest.approx(1.0 / math.pi, rel=1e-11)


# ---------------------------------------------------------------------------
# scaled arithmetic
# ---------------------------------------------------------------------------

def test_scaled_wronskian_residual_over_wide_disk():
    # 1000 random points over |z| <= 50.  The identity
    # t1 - t2 = exp(s - |s|)/pi holds for the scaled products; the
    # residual is measured against the largest participating magnitude,
    # which is the well-conditioned formulation at depth where the raw
    # difference cancels below double precision.
    rng = np.random.default_rng(424242)
    u = rng.random(1000)
    theta = rng.random(1000) * 2.0 * math.pi
    for zi in 50.0 * np.sqrt(u) * np.exp(1j * theta):
        pair = airy_eval_scaled(complex(zi))
        t1 = pair.ai * pair.bip
        t2 = pair.aip * pair.bi
        s = pair.exponent
        expected = math.exp(min(s - abs(s), 0.0)) / math.pi
        residual = abs((t1 - t2) - expected)
        assert residual <= 1e-9 * max(abs(t1), abs(t2), 1.0 / math.pi)


def test_scaled_agrees_with_unscaled_at_moderate_argument():
    for z in (-8.0, 1.5, 4.0, 2.0 + 3.0j, -5.0 - 2.0j):
        scaled = airy_eval_scaled(z)
        plain = airy_eval(z)
        rebuilt = scaled.unscaled()
        for g, w in zip(_quartet(rebuilt), _quartet(plain)):
            assert complex(g) == pytest.approx(complex(w), rel=1e-12, abs=1e-300)


def test_scaled_exponent_convention():
    # ai_scaled = Ai * exp(+s), bi_scaled = Bi * exp(-|s|).
    z = 3.0 + 1.0j
    scaled = airy_eval_scaled(z)
    plain = airy_eval(z)
    s = growth_exponent(z)
    assert scaled.exponent == pytest.approx(s, rel=1e-14)
    assert scaled.ai == pytest.approx(plain.ai * math.exp(s), rel=1e-12)
    assert scaled.bi == pytest.approx(plain.bi * math.exp(-abs(s)), rel=1e-12)


def test_scaled_negative_real_axis_identity():
    pair = airy_eval_scaled(-4.2)
    assert pair.exponent == 0.0
    plain = airy_eval(-4.2)
    for g, w in zip(_quartet(pair), _quartet(plain)):
        assert g == w
    assert growth_exponent(-4.2) == 0.0


def test_scaled_survives_where_unscaled_overflows():
    z = 500.0
    with pytest.raises(AiryRangeError):
        airy_eval(z)
    scaled = airy_eval_scaled(z)
    assert all(np.isfinite([scaled.ai, scaled.bi, scaled.aip, scaled.bip]).all()
               for _ in (0,))
    assert scaled.exponent > 709.0
    with pytest.raises(AiryRangeError):
        scaled.unscaled()


def test_argument_range_policy():
    with pytest.raises(ValueError):
        airy_eval(1.0e4)
    with pytest.raises(ValueError):
        airy_eval_scaled(-2.0e4 + 0.0j)
    with pytest.raises(ValueError):
        airy_eval(float("nan"))
    with pytest.raises(ValueError):
        airy_eval(complex(1.0, float("inf")))


# ---------------------------------------------------------------------------
# zeros of Ai
# ---------------------------------------------------------------------------

def test_zeros_match_high_precision_reference():
    zeros = ai_negative_zeros(7)
    for n in range(1, 8):
        assert zeros[n - 1] == pytest.approx(ai_zero_mp(n), abs=1e-11)


def test_zeros_are_actual_roots():
    for lam in ai_negative_zeros(9):
        pair = airy_eval(-lam)
        assert abs(pair.ai) < 1e-13 * abs(pair.aip)


def test_zeros_strictly_increasing_and_near_semiclassical():
    zeros = ai_negative_zeros(50)
    assert np.all(np.diff(zeros) > 0.0)
    # Semiclassical estimate converges from below the percent level.
    est = wkb_zero_estimate(np.arange(1, 51))
    rel = np.abs(zeros - est) / zeros
    assert rel[0] < 8e-3
    assert rel[-1] < 3e-6


def test_wkb_estimate_matches_oracle_formula():
    for n in (1, 2, 7, 30):
        assert wkb_zero_estimate(n) == pytest.approx(wkb_eigenvalue(n), rel=1e-14)


def test_zero_count_validation():
    with pytest.raises(ValueError):
        ai_negative_zeros(0)
    with pytest.raises(ValueError):
        ai_negative_zeros(10001)
    with pytest.raises(ValueError):
        ai_negative_zeros(2.5)


def test_deep_zero_against_reference():
    zeros = ai_negative_zeros(200)
    assert zeros[199] == pytest.approx(ai_zero_mp(200), rel=1e-12)


def test_airy_mp_oracle_is_consistent_with_production():
    # Tie the production evaluator to the arbitrary-precision oracle at a
    # few complex points (independent of the series route above).
    for z in (2.2 - 1.7j, -3.3 + 2.1j, 6.5):
        got = _quartet(airy_eval(z))
        want = airy_mp(z)
        scale = max(1.0, *(abs(complex(w)) for w in want))
        for g, w in zip(got, want):
            assert abs(complex(g) - complex(w)) < 5e-12 * scale
