"""Ideal-mirror gravitational spectrum and semiclassical quantities.

A particle bouncing on a perfect mirror in a uniform field has wave
functions ``phi_n(xi) = N_n * Ai(xi - lambda_n)`` in the dimensionless
height ``xi = z/l0``, where ``lambda_n`` is the n-th zero of ``Ai(-x)``.
This module provides the exact spectrum, the semiclassical (WKB)
eigenvalue estimate, classical bounce/collision frequencies, the
gravitational-barrier tunnelling probability for a wall raised above the
turning point, the resulting long lifetime, and the WKB state count of a
slit of height H.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .airy import ai_negative_zeros, wkb_zero_estimate
from .scales import PhysicalScales, neutron_scales, to_physical

__all__ = [
    "GravState",
    "spectrum",
    "wkb_lambda",
    "bounce_frequency",
    "tunneling_probability",
    "tau_long",
    "tau_long_lambda",
    "count_states_wkb",
]


@dataclass(frozen=True)
class GravState:
    """One bound state above an ideal mirror.

    Attributes
    ----------
    n : int
        State index, starting at 1.
    lam : float
        Dimensionless eigenvalue (n-th zero of ``Ai(-x)``).
    energy_peV : float
        ``eps0 * lam``.
    turning_point_um : float
        Classical turning height ``H_n = l0 * lam``.
    norm : float
        Normalization constant of ``phi_n(xi) = norm * Ai(xi - lam)`` such
        that ``integral(phi_n^2, xi=0..inf) = 1``.
    """

    n: int
    lam: float
    energy_peV: float
    turning_point_um: float
    norm: float

    def phi(self, xi: np.ndarray) -> np.ndarray:
        """Evaluate the normalized wave function on dimensionless heights."""
        ai = special.airy(np.asarray(xi, dtype=float) - self.lam)[0]
        return self.norm * ai


def _norm_constant(lam: float) -> float:
    """Normalization of Ai(xi - lam) on [0, inf) by adaptive quadrature.

    The integrand decays superexponentially; the tail beyond ``lam + 15``
    is below 1e-16 of the peak and is truncated.
    """
    upper = lam + 15.0
    val, _ = integrate.quad(
        lambda x: special.airy(x - lam)[0] ** 2, 0.0, upper, limit=200
    )
    return 1.0 / math.sqrt(val)


def spectrum(count: int, scales: PhysicalScales | None = None) -> list[GravState]:
    """First ``count`` bound states above an ideal mirror.

    Parameters
    ----------
    count : int
        Number of states (>= 1).
    scales : PhysicalScales, optional
        Defaults to :func:`neutron_scales`.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if scales is None:
        scales = neutron_scales()
    lams = ai_negative_zeros(count)
    states = []
    for i, lam in enumerate(lams, start=1):
        energy, height = to_physical(float(lam), scales)
        states.append(
            GravState(
                n=i,
                lam=float(lam),
                energy_peV=float(energy.real if isinstance(energy, complex) else energy),
                turning_point_um=height,
                norm=_norm_constant(float(lam)),
            )
        )
    return states


def wkb_lambda(n: int) -> float:
    """Semiclassical eigenvalue estimate ``((3 pi/4)(2n - 1/2))**(2/3)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return float(wkb_zero_estimate(n))


def bounce_frequency(state: GravState, scales: PhysicalScales) -> float:
    """Classical wall-collision rate of state ``n`` in 1/s.

    Equals ``(eps0/hbar) * sqrt(l0/H_n) / 2``, which is algebraically
    identical to ``1/T`` with the classical bounce period
    ``T = 2 sqrt(2 H_n / g)`` (an exact identity, not an approximation).
    Note this is a collision *rate*, not an angular frequency ``2 pi/T``.
    """
    return (
        scales.eps0_peV
        / scales.hbar_peV_s
        * math.sqrt(scales.l0_um / state.turning_point_um)
        / 2.0
    )


def tunneling_probability(state: GravState, height_um: float,
                          scales: PhysicalScales | None = None) -> float:
    """Probability of escaping through the gravitational barrier.

    For a wall raised to ``H`` above the turning point ``H_n`` the barrier
    transmission is ``exp(-(4/3) ((H - H_n)/l0)**1.5)``; for ``H <= H_n``
    the barrier has zero width and the probability is 1.
    """
    if scales is None:
        scales = neutron_scales()
    x = (height_um - state.turning_point_um) / scales.l0_um
    if x <= 0.0:
        return 1.0
    return math.exp(-(4.0 / 3.0) * x ** 1.5)


def tau_long_lambda(lam: float, height_um: float,
                    scales: PhysicalScales | None = None) -> float:
    """Escape lifetime for a free (not necessarily integer-state) eigenvalue.

    ``tau = (1/omega) * exp(+(4/3) (H/l0 - lam)**1.5)`` with the collision
    rate ``omega = (eps0/hbar)/(2 sqrt(lam))`` of the turning height
    ``lam * l0``.  Below the turning point the exponent is continued with
    its odd signed power (``sign(x) |x|**1.5``), which collapses the
    lifetime smoothly to a fraction of the bounce period -- the behaviour
    needed for threshold studies of the transmitted flux, and the smooth
    parameterization the step-model fit differentiates through.
    """
    if scales is None:
        scales = neutron_scales()
    if lam <= 0.0:
        raise ValueError("eigenvalue parameter must be positive")
    omega = scales.eps0_peV / scales.hbar_peV_s / (2.0 * math.sqrt(lam))
    x = height_um / scales.l0_um - lam
    exponent = (4.0 / 3.0) * math.copysign(abs(x) ** 1.5, x)
    # Clamp to the double range; e^{+-700} is far beyond any physical use.
    exponent = max(min(exponent, 700.0), -700.0)
    return math.exp(exponent) / omega


def tau_long(state: GravState, height_um: float,
             scales: PhysicalScales | None = None) -> float:
    """Escape lifetime of state ``n`` under a wall at height ``H`` (s)."""
    return tau_long_lambda(state.lam, height_um, scales)


def count_states_wkb(height_um: float,
                     scales: PhysicalScales | None = None) -> float:
    """Semiclassical number of states with turning point below ``H``.

    ``N(H) = (2/(3 pi)) (H/l0)**1.5 + 1/4``.
    """
    if height_um <= 0.0:
        raise ValueError("height must be positive")
    if scales is None:
        scales = neutron_scales()
    h = height_um / scales.l0_um
    return (2.0 / (3.0 * math.pi)) * h ** 1.5 + 0.25
