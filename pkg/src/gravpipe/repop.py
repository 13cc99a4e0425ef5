"""Sudden-approximation repopulation across a stepped bottom mirror.

Downstream of the step the bottom mirror sits ``Delta`` lower while the
ceiling stays put, so the downstream guide is taller by ``Delta`` and its
modes, written in upstream coordinates, are evaluated at ``z + Delta``
("+Delta convention": the downstream floor is *below* the upstream one,
so an upstream height ``z`` lies ``z + Delta`` above the downstream
floor)::

        ceiling ------------------------------- z = H
            upstream guide      downstream guide
        floor ________________
                       z = 0  |_______________  z = -Delta

Treating the step as sudden, the amplitude carried from upstream mode j
into downstream mode m is the bilinear overlap (no conjugation)
``integral(phi_j(z) phi_m(z + Delta) dz, 0..H)`` times the upstream decay
accumulated before the step.  Overlaps are evaluated by exact endpoint
identities of the Airy equation (both for ideal semi-infinite states and
for absorber-bounded guide modes); nothing is numerically integrated
outside the test oracles.

The detector flux sums squared repopulation amplitudes with each decay
segment counted once: upstream width over the time before the step,
downstream width over the remainder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import eigen
from .eigen import ComplexMode, ModeFunction, mode_function
from .flux import AveragedFluxPoint, WaveguideConfig
from .gravspec import GravState, spectrum
from .scales import PhysicalScales, neutron_scales

__all__ = [
    "StepGeometry",
    "repopulation_matrix",
    "ideal_overlap",
    "table_overlap_column",
    "flux_with_step",
    "ground_state_population_scan",
]

#: Relative eigenvalue-gap threshold below which overlap denominators
#: switch to their analytic near-degenerate continuation.
_DEGENERACY_TOL = 1e-6


@dataclass(frozen=True)
class StepGeometry:
    """Position and size of the bottom-mirror step.

    Attributes
    ----------
    L0_cm : float
        Distance of the step from the guide entrance (cm); must lie
        strictly inside the guide.
    Delta_um : float
        Downward shift of the downstream mirror (um, >= 0).
    """

    L0_cm: float
    Delta_um: float

    def __post_init__(self) -> None:
        if self.L0_cm <= 0.0:
            raise ValueError("step position must be positive")
        if self.Delta_um < 0.0:
            raise ValueError("mirror shift must be non-negative")

    def tau0_s(self, V_ms: float) -> float:
        """Time of flight to the step, ``L0/V`` in seconds."""
        if V_ms <= 0.0:
            raise ValueError("velocity must be positive")
        return self.L0_cm * 1e-2 / V_ms


# ---------------------------------------------------------------------------
# closed-form overlaps
# ---------------------------------------------------------------------------

def ideal_overlap(state_j: GravState, state_m: GravState,
                  delta_um: float,
                  scales: PhysicalScales | None = None) -> float:
    """Overlap of ideal semi-infinite states across a mirror shift.

    ``integral(phi_j(z) phi_m(z + Delta) dz, 0..inf)`` in closed form:
    the endpoint identity collapses it to
    ``N_j N_m Ai'(-lam_j) Ai(delta - lam_m) / (lam_j + delta - lam_m)``
    (dimensionless ``delta = Delta/l0``), with the analytic limit taken
    when the denominator crosses zero (exact state matching).
    """
    if scales is None:
        scales = neutron_scales()
    delta = delta_um / scales.l0_um
    from scipy import special
    aip_j = float(special.airy(-state_j.lam)[1])
    den = state_j.lam + delta - state_m.lam
    if abs(den) < _DEGENERACY_TOL:
        # Ai(delta - lam_m) = Ai(-lam_j + den); expand about the zero:
        # Ai/den = Ai'(-lam_j) (1 - lam_j den^2/6 + ...)  (Ai'' term vanishes)
        ratio = float(special.airy(-state_j.lam)[1]) * (
            1.0 - state_j.lam * den ** 2 / 6.0
        )
    else:
        ratio = float(special.airy(delta - state_m.lam)[0]) / den
    # physical-units integral carries l0; norms carry 1/sqrt(l0) each
    return state_j.norm * state_m.norm * aip_j * ratio


def _guide_overlap(before: ModeFunction, after: ModeFunction,
                   delta_um: float) -> complex:
    """Bilinear overlap of guide modes across the step (closed form).

    ``integral(psi_j(z) psi_m(z + Delta) dz, 0..H)`` for an upstream mode
    of slit ``H`` and a downstream mode of slit ``H + Delta``; endpoint
    identity with the bottom boundary term surviving (the downstream mode
    is nonzero at the upstream floor) and the upstream Wronskian value
    ``y'(0) = -1/pi`` exact.
    """
    if before.degenerate or after.degenerate:
        raise ValueError(
            "mode representation degenerate; step overlaps need modes "
            "within the double-precision Airy regime"
        )
    l0 = before.l0_um
    delta = delta_um / l0
    h = before.h

    def raw(delta_var: float) -> complex:
        yb_top = complex(after.raw_value(h + delta_var))
        ybp_top = complex(after.raw_derivative(h + delta_var))
        top = before._yph * (yb_top - before.q * ybp_top)
        bottom = complex(after.raw_value(delta_var)) / math.pi
        den = after.lam - delta_var - before.lam
        return (top + bottom) / den

    den0 = after.lam - delta - before.lam
    if abs(den0) < _DEGENERACY_TOL:
        eps = 1e-4
        val = 0.5 * (raw(delta + eps) + raw(delta - eps))
    else:
        val = raw(delta)
    return complex(before.norm * after.norm * l0 * val)


# ---------------------------------------------------------------------------
# repopulation matrix
# ---------------------------------------------------------------------------

def repopulation_matrix(states_before, states_after, delta_um: float,
                        widths_peV=None, tau0_s: float = 0.0,
                        scales: PhysicalScales | None = None) -> np.ndarray:
    """Sudden-approximation repopulation amplitudes across the step.

    ``C[j, m] = exp(-Gamma_j tau0 / (2 hbar)) *
    integral(phi_j(z) phi_m(z + Delta) dz)`` with bilinear (unconjugated)
    overlaps; rows index upstream states, columns downstream states.

    Both bases may be ideal semi-infinite states (``GravState``, overlap
    domain effectively ``[0, inf)``) or absorber-bounded guide modes
    (``ComplexMode`` solved at slit heights ``H`` and ``H + Delta``,
    overlap domain ``[0, H]``); outputs are labeled by the input types.
    ``widths_peV`` defaults to zero for ideal states and to the modes' own
    widths otherwise.
    """
    if scales is None:
        scales = neutron_scales()
    if delta_um < 0.0:
        raise ValueError("mirror shift must be non-negative")
    ideal_before = all(isinstance(s, GravState) for s in states_before)
    ideal_after = all(isinstance(s, GravState) for s in states_after)
    if ideal_before != ideal_after:
        raise TypeError("before and after bases must be of the same kind")
    if ideal_before:
        overlap = np.array([
            [ideal_overlap(sj, sm, delta_um, scales) for sm in states_after]
            for sj in states_before
        ], dtype=complex)
        default_widths = np.zeros(len(states_before))
    else:
        H_before = states_before[0].H_um
        for m in states_after:
            if not math.isclose(m.H_um, H_before + delta_um,
                                rel_tol=0.0, abs_tol=1e-9):
                raise ValueError(
                    "downstream modes must be solved at slit height "
                    "H + Delta"
                )
        f_before = [mode_function(m, scales) for m in states_before]
        f_after = [mode_function(m, scales) for m in states_after]
        overlap = np.array([
            [_guide_overlap(fb, fa, delta_um) for fa in f_after]
            for fb in f_before
        ], dtype=complex)
        default_widths = np.array([m.gamma_peV for m in states_before])
    if widths_peV is None:
        widths = default_widths
    else:
        widths = np.asarray(widths_peV, dtype=float)
        if widths.shape != (len(states_before),):
            raise ValueError("one width per upstream state required")
    prefactor = np.exp(-widths * tau0_s / (2.0 * scales.hbar_peV_s))
    return prefactor[:, None] * overlap


def table_overlap_column(delta_um: float, count: int = 7,
                         scales: PhysicalScales | None = None) -> np.ndarray:
    """Squared overlaps of the upstream ideal ground state with the first
    ``count`` downstream ideal states (the two-mirror, no-absorber
    benchmark column)."""
    states = spectrum(count, scales)
    g = states[0]
    return np.array([
        ideal_overlap(g, sm, delta_um, scales) ** 2 for sm in states
    ])


def ground_state_population_scan(delta_values_um,
                                 scales: PhysicalScales | None = None
                                 ) -> np.ndarray:
    """Squared ground-to-ground overlap versus mirror shift (ideal basis).

    Continuous, equal to 1 at zero shift, bounded by 1, and touching zero
    where the shifted ground state's overlap integral changes sign (the
    first such zero is the optimal ground-state suppression point).
    """
    states = spectrum(1, scales)
    g = states[0]
    return np.array([
        ideal_overlap(g, g, float(d), scales) ** 2
        for d in np.asarray(delta_values_um, dtype=float)
    ])


# ---------------------------------------------------------------------------
# flux with a stepped mirror
# ---------------------------------------------------------------------------

def flux_with_step(config: WaveguideConfig, step: StepGeometry,
                   modes_before: list[ComplexMode],
                   modes_after: list[ComplexMode] | None = None,
                   scales: PhysicalScales | None = None
                   ) -> AveragedFluxPoint:
    """Detector flux behind a stepped-mirror guide (broad-velocity limit).

    ``F = sum_{j,m} |O_jm|^2 exp(-Gamma_j tau0/hbar
    - Gamma_m (tau_pass - tau0)/hbar)`` with bare squared overlaps
    ``|O_jm|^2``: upstream decay acts for the time before the step and
    downstream decay for the remainder, each counted exactly once.
    Interference terms are dropped (wide longitudinal-velocity spread).
    ``mode_terms`` reports the per-downstream-mode totals.
    """
    if scales is None:
        scales = neutron_scales()
    if not step.L0_cm < config.L_cm:
        raise ValueError("step must lie strictly inside the guide")
    tau0 = step.tau0_s(config.V_ms)
    tau_pass = config.tau_pass_s
    if modes_after is None:
        modes_after = eigen.solve_direct(
            config.H_um + step.Delta_um, config.absorber,
            len(modes_before), scales,
        )
    overlap = repopulation_matrix(modes_before, modes_after, step.Delta_um,
                                  widths_peV=np.zeros(len(modes_before)),
                                  tau0_s=0.0, scales=scales)
    hbar = scales.hbar_peV_s
    g_before = np.array([m.gamma_peV for m in modes_before])
    g_after = np.array([m.gamma_peV for m in modes_after])
    exponent = (g_before[:, None] * tau0
                + g_after[None, :] * (tau_pass - tau0)) / hbar
    contrib = np.abs(overlap) ** 2 * np.exp(-np.minimum(exponent, 745.0))
    per_after = contrib.sum(axis=0)
    return AveragedFluxPoint(
        H_um=config.H_um,
        F=float(per_after.sum()),
        mode_terms=per_after,
        interference=0.0,
        included=len(modes_after),
    )
