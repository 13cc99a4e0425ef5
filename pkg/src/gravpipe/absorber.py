"""Absorber physics summarized by a complex scattering length.

A slow particle hitting an absorbing/lossy boundary is described by a
complex scattering length ``a``; the model implemented here is a smooth
complex step ("Woods-Saxon" profile) of depth ``U``, diffuseness ``rho``
and loss phase ``phi``::

    V(z) = U * exp(-i phi) / (1 + exp((H - z)/rho))

whose exact scattering length is

    a = H - 1/kappa + 2 rho (gamma_E + psi(1 + rho kappa)),
    kappa = exp(-i phi/2) sqrt(2 m U) / hbar,

with ``psi`` the digamma function.  The boundary-independent tail value
``a_tilde = a - H`` feeds the eigenvalue problems.  Also provided: the
quantum absorption/reflection probabilities at small ``k |Im a|``, the
longitudinally averaged one-dimensional potential of a corrugated
(rough) edge, and the effective scattering length of a weakly rough
absorber.

Validity gating is warn-not-fail: formulas evaluate outside their stated
comfort domains but issue :class:`ValidityWarning`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .scales import PhysicalScales, neutron_scales

__all__ = [
    "ValidityWarning",
    "WoodsSaxon",
    "ScatteringLength",
    "ws_scattering_length",
    "kappa",
    "absorption_probability",
    "reflection_probability",
    "effective_potential",
    "grating_effective_potential",
    "rough_effective_length",
]

#: Euler-Mascheroni constant.
EULER_GAMMA = 0.5772156649015329

#: |a_tilde|/l0 ratio beyond which a validity warning is issued.
TAIL_COMFORT_RATIO = 0.3


class ValidityWarning(UserWarning):
    """A formula was evaluated outside its stated comfort domain."""


@dataclass(frozen=True)
class WoodsSaxon:
    """Smooth complex absorbing step.

    Attributes
    ----------
    depth_eV : float
        Potential depth ``U`` in eV (> 0).
    rho_um : float
        Diffuseness ``rho`` in um (> 0).
    phi_rad : float
        Loss phase ``phi`` in radians, ``0 < phi < pi``.
    offset_um : float
        Position ``H`` of the step in um (default 0).
    """

    depth_eV: float
    rho_um: float
    phi_rad: float
    offset_um: float = 0.0

    def __post_init__(self) -> None:
        if self.depth_eV <= 0.0:
            raise ValueError("depth must be positive")
        if self.rho_um <= 0.0:
            raise ValueError("diffuseness must be positive")
        if not 0.0 < self.phi_rad < math.pi:
            raise ValueError("loss phase must lie in (0, pi)")


@dataclass(frozen=True)
class ScatteringLength:
    """Complex scattering length with its boundary offset.

    Attributes
    ----------
    a_um : complex
        Scattering length ``a`` in um, ``Im a <= 0`` (absorption).
    offset_um : float
        Boundary position ``H`` whose subtraction gives the tail value.
    """

    a_um: complex
    offset_um: float = 0.0

    def __post_init__(self) -> None:
        if complex(self.a_um).imag > 0.0:
            raise ValueError("Im a must be <= 0 for an absorbing boundary")

    @property
    def tail_um(self) -> complex:
        """Offset-independent tail value ``a - H``."""
        return complex(self.a_um) - self.offset_um

    @property
    def im_a_um(self) -> float:
        """``|Im a|`` in um (identical for ``a`` and the tail value)."""
        return abs(complex(self.a_um).imag)


def _warn_if_large_tail(sl: ScatteringLength, scales: PhysicalScales) -> None:
    ratio = abs(sl.tail_um) / scales.l0_um
    if ratio > TAIL_COMFORT_RATIO:
        warnings.warn(
            f"|a - H|/l0 = {ratio:.3g} exceeds the comfort ratio "
            f"{TAIL_COMFORT_RATIO}; results remain defined but the "
            "short-scatterer expansion degrades",
            ValidityWarning,
            stacklevel=3,
        )


def kappa(model: WoodsSaxon, scales: PhysicalScales | None = None) -> complex:
    """Complex interior wavenumber ``exp(-i phi/2) sqrt(2 m U)/hbar`` (1/um)."""
    if scales is None:
        scales = neutron_scales()
    depth_peV = model.depth_eV * 1e12
    k_mag = math.sqrt(depth_peV / scales.kinetic_coefficient_peV_um2)
    return k_mag * complex(math.cos(model.phi_rad / 2.0),
                           -math.sin(model.phi_rad / 2.0))


def ws_scattering_length(model: WoodsSaxon,
                         scales: PhysicalScales | None = None) -> ScatteringLength:
    """Exact scattering length of the smooth complex step.

    ``a = H - 1/kappa + 2 rho (gamma_E + psi(1 + rho kappa))``.

    Limits (both verified by the test suite):

    * deep/sharp, ``rho |kappa| >> 1``: ``Im a -> -rho phi`` independent of
      the depth;
    * thin, ``rho kappa << 1``: ``a - H -> -1/kappa + (pi^2/3) rho^2 kappa``.
    """
    if scales is None:
        scales = neutron_scales()
    kap = kappa(model, scales)
    arg = 1.0 + model.rho_um * kap
    # The digamma poles sit at non-positive integers; with rho > 0, U > 0 and
    # 0 < phi < pi the argument has Re > 1 and cannot reach them.
    assert arg.real > 0.0, "digamma argument left the physical half-plane"
    psi = complex(special.digamma(arg))
    a = model.offset_um - 1.0 / kap + 2.0 * model.rho_um * (EULER_GAMMA + psi)
    sl = ScatteringLength(a_um=a, offset_um=model.offset_um)
    _warn_if_large_tail(sl, scales)
    return sl


def absorption_probability(k_per_um: float, a: ScatteringLength) -> float:
    """Absorption probability per collision, ``P = 4 k |Im a|``.

    Valid in the quantum-reflection regime ``k |Im a| < 1/4``; beyond it the
    value is clamped to 1 with a :class:`ValidityWarning`.
    """
    if k_per_um < 0.0:
        raise ValueError("wavenumber must be non-negative")
    x = k_per_um * a.im_a_um
    if x >= 0.25:
        warnings.warn(
            f"k |Im a| = {x:.3g} outside the quantum-reflection domain "
            "(< 0.25); clamping P to 1",
            ValidityWarning,
            stacklevel=2,
        )
        return 1.0
    return 4.0 * x


def reflection_probability(k_per_um: float, a: ScatteringLength) -> float:
    """Quantum reflection probability ``R = 1 - P`` (exact complement)."""
    return 1.0 - absorption_probability(k_per_um, a)


def effective_potential(v_xz: np.ndarray, x_grid: np.ndarray,
                        period_um: float) -> np.ndarray:
    """Longitudinal average of a corrugated-edge potential.

    Parameters
    ----------
    v_xz : ndarray, shape (nx, nz)
        Sampled potential ``V(x, z)`` over one period in ``x``.
    x_grid : ndarray, shape (nx,)
        Longitudinal sample positions (um) spanning the period.
    period_um : float
        Normalization length ``L`` (um); must cover the correlation length
        of the profile (caller asserts).

    Returns
    -------
    ndarray, shape (nz,)
        ``V_eff(z) = (1/L) * integral(V(x, z) dx)``.
    """
    if period_um <= 0.0:
        raise ValueError("period must be positive")
    v = np.asarray(v_xz, dtype=complex)
    x = np.asarray(x_grid, dtype=float)
    if v.shape[0] != x.shape[0]:
        raise ValueError("x grid length must match the first axis of V")
    integral = np.trapezoid(v, x=x, axis=0)
    out = integral / period_um
    if np.all(np.abs(out.imag) == 0.0):
        return out.real
    return out


def grating_effective_potential(depth: float, filled_width_um: np.ndarray,
                                period_um: float) -> np.ndarray:
    """Averaged potential of a grating: ``V_eff(z) = U * d(z) / L``.

    ``d(z)`` is the filled width of material at height ``z`` within one
    longitudinal period ``L``; a fully filled layer (``d = L``) returns the
    bulk value ``U``.
    """
    if period_um <= 0.0:
        raise ValueError("period must be positive")
    d = np.asarray(filled_width_um, dtype=float)
    if np.any(d < 0.0) or np.any(d > period_um):
        raise ValueError("filled width must lie within [0, period]")
    return depth * d / period_um


def rough_effective_length(b_um: float, a_flat: ScatteringLength,
                           scales: PhysicalScales | None = None) -> float:
    """Effective |Im a| of a weakly rough absorber: ``b^2/(16 |Im a|)``.

    Quadratic in the roughness amplitude ``b``; valid for ``b`` small
    compared to ``l0`` (warned otherwise).
    """
    if b_um < 0.0:
        raise ValueError("roughness amplitude must be non-negative")
    if b_um == 0.0:
        return 0.0
    if scales is None:
        scales = neutron_scales()
    if b_um >= scales.l0_um:
        warnings.warn(
            f"roughness amplitude b = {b_um:.3g} um is not small compared "
            f"with l0 = {scales.l0_um:.3g} um; the quadratic model degrades",
            ValidityWarning,
            stacklevel=2,
        )
    im_a = a_flat.im_a_um
    if im_a == 0.0:
        raise ValueError("flat absorber must have Im a < 0")
    return b_um ** 2 / (16.0 * im_a)
