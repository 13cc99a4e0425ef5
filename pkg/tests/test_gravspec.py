"""Ideal-mirror bound states: eigenvalues, norms, classical quantities."""

from __future__ import annotations

import math

import numpy as np
import pytest

from gravpipe.gravspec import (
    count_states_wkb,
    bounce_frequency,
    spectrum,
    tau_long,
    tau_long_lambda,
    tunneling_probability,
    wkb_lambda,
)
from oracles import ai_zero_mp, airy_mp, bounce_period_s, wkb_eigenvalue


def test_spectrum_eigenvalues_match_reference(scales):
    states = spectrum(7, scales)
    assert [s.n for s in states] == list(range(1, 8))
    for state in states:
        lam_ref = ai_zero_mp(state.n)
        assert state.lam == pytest.approx(lam_ref, abs=1e-11)
        assert state.energy_peV == pytest.approx(scales.eps0_peV * lam_ref, rel=1e-11)
        assert state.turning_point_um == pytest.approx(scales.l0_um * lam_ref, rel=1e-11)


def test_spectrum_count_validation():
    with pytest.raises(ValueError):
        spectrum(0)
    assert len(spectrum(1)) == 1


def test_norm_closed_form(scales):
    # integral(Ai(xi - lam_n)^2, 0..inf) = Ai'(-lam_n)^2, so the
    # normalization constant must equal 1/|Ai'(-lam_n)|.
    for state in spectrum(6, scales):
        aip = complex(airy_mp(-state.lam)[1]).real
        assert state.norm == pytest.approx(1.0 / abs(aip), rel=1e-9)


def test_wavefunction_node_and_normalization(scales):
    state = spectrum(3, scales)[2]
    assert abs(state.phi(np.array([0.0]))[0]) < 1e-10
    # Independent trapezoidal normalization check on a fine grid.
    xi = np.linspace(0.0, state.lam + 12.0, 40001)
    norm = np.trapezoid(state.phi(xi) ** 2, xi)
    assert norm == pytest.approx(1.0, rel=1e-8)


def test_wavefunction_interior_nodes(scales):
    # State n has n - 1 interior sign changes.
    for state in spectrum(4, scales):
        xi = np.linspace(1e-3, state.lam + 8.0, 20000)
        signs = np.sign(state.phi(xi))
        flips = np.count_nonzero(np.diff(signs) != 0)
        assert flips == state.n - 1


def test_wkb_lambda_formula_and_accuracy():
    for n in (1, 2, 5, 12):
        assert wkb_lambda(n) == pytest.approx(wkb_eigenvalue(n), rel=1e-14)
    assert abs(wkb_lambda(1) - ai_zero_mp(1)) / ai_zero_mp(1) < 8e-3
    with pytest.raises(ValueError):
        wkb_lambda(0)


def test_bounce_frequency_is_inverse_classical_period(scales):
    for state in spectrum(5, scales):
        period = bounce_period_s(state.turning_point_um, scales.g_ms2)
        assert bounce_frequency(state, scales) == pytest.approx(
            1.0 / period, rel=1e-8)


def test_tunneling_probability_shape(scales):
    state = spectrum(1, scales)[0]
    h1 = state.turning_point_um
    assert tunneling_probability(state, 0.5 * h1, scales) == 1.0
    assert tunneling_probability(state, h1, scales) == 1.0
    one_unit_up = tunneling_probability(state, h1 + scales.l0_um, scales)
    assert one_unit_up == pytest.approx(math.exp(-4.0 / 3.0), rel=1e-12)
    heights = h1 + np.linspace(0.0, 30.0, 40)
    probs = [tunneling_probability(state, h, scales) for h in heights]
    assert all(a >= b for a, b in zip(probs, probs[1:]))


def test_tau_long_at_turning_point_is_bounce_scale(scales):
    state = spectrum(2, scales)[1]
    tau = tau_long(state, state.turning_point_um, scales)
    omega = scales.eps0_peV / scales.hbar_peV_s / (2.0 * math.sqrt(state.lam))
    assert tau == pytest.approx(1.0 / omega, rel=1e-12)


def test_tau_long_monotone_and_signed_continuation(scales):
    state = spectrum(1, scales)[0]
    heights = np.linspace(2.0, 60.0, 30)
    taus = [tau_long(state, h, scales) for h in heights]
    assert all(a < b for a, b in zip(taus, taus[1:]))
    below = tau_long(state, 0.3 * state.turning_point_um, scales)
    at = tau_long(state, state.turning_point_um, scales)
    assert below < at
    with pytest.raises(ValueError):
        tau_long_lambda(-1.0, 20.0, scales)


def test_tau_long_consistent_between_state_and_lambda_forms(scales):
    state = spectrum(3, scales)[2]
    assert tau_long(state, 41.0, scales) == tau_long_lambda(state.lam, 41.0, scales)


def test_count_states_wkb_inverts_semiclassical_eigenvalues(scales):
    # At the semiclassical eigenvalue heights the counter is exactly n.
    for n in (1, 2, 3, 8):
        height = scales.l0_um * wkb_lambda(n)
        assert count_states_wkb(height, scales) == pytest.approx(n, rel=1e-12)
    # and close to n at the exact heights
    for state in spectrum(4, scales):
        assert count_states_wkb(state.turning_point_um, scales) == pytest.approx(
            state.n, abs=0.02)
    with pytest.raises(ValueError):
        count_states_wkb(0.0, scales)
