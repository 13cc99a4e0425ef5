"""Complex transcendental eigenvalue solvers for every confinement geometry.

Geometries
----------
direct
    Mirror below, absorber (complex scattering length ``a``) at height H.
    Eigenvalue equation in dimensionless form (``h = H/l0``,
    ``q = (a - H)/l0``, ``w = h - lambda``)::

        Ai(-lam) [Bi(w) - q Bi'(w)] = Bi(-lam) [Ai(w) - q Ai'(w)]

two_wall
    Same with ``q = 0`` (two ideal walls, gravity inside).
inverse
    Absorber below, mirror above; with ``q_a = a/l0``::

        q_a [Ai(w) Bi'(-lam) - Ai'(-lam) Bi(w)]
            = Ai(-lam) Bi(w) - Bi(-lam) Ai(w)

box
    Gravity-free slit: ``k_n = pi n / (H - (a - H))`` exactly, with the
    closed-form complex energy; no root search required.

All residuals are evaluated in the entire (pole-free) product form,
rescaled with exponentially scaled Airy values so nothing overflows; the
rescaling factor is common to the residual and its analytic derivative, so
Newton steps are exact.  Derivatives come from ``Ai''(x) = x Ai(x)``; no
finite differences anywhere.  Families are tracked by continuation along a
descending height grid starting in the ideal-state regime, with automatic
step refinement where branches steepen (small heights), which keeps mode
labels stable through avoided crossings.

Mode functions are normalized by the *bilinear* (no conjugation) norm
``integral(psi^2 dz) = 1``, the natural orthogonality of a non-self-adjoint
(absorbing) Hamiltonian; because the top-wall condition does not involve
the eigenvalue, distinct modes of one family are bilinearly orthogonal
exactly.  The conjugated (Hermitian) overlaps consumed by interference
formulas are provided in closed form as well.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .absorber import ScatteringLength
from .airy import ai_negative_zeros
from .scales import PhysicalScales, neutron_scales

__all__ = [
    "ComplexMode",
    "ModeFunction",
    "ContinuationError",
    "ConvergenceError",
    "solve_direct",
    "solve_direct_sweep",
    "solve_two_wall",
    "two_wall_roots",
    "solve_inverse",
    "solve_box",
    "box_width_leading",
    "box_collision_rate",
    "width_perturbative",
    "shift_perturbative",
    "InverseWidth",
    "inverse_width_limit",
    "inverse_width_deep",
    "mode_function",
    "overlap_biorthogonal",
    "overlap_hermitian",
    "dlambda_dh_two_wall",
]

#: Hard cap on the number of modes per family.
MAX_MODES = 50

#: Two roots closer than this (dimensionless) abort continuation.
BIFURCATION_TOL = 1e-8


class ConvergenceError(RuntimeError):
    """Newton iteration failed to converge."""


class ContinuationError(RuntimeError):
    """Root tracking lost a branch (collision or unresolvable jump)."""


@dataclass(frozen=True)
class ComplexMode:
    """One quasi-bound transversal mode.

    Attributes
    ----------
    n : int
        Mode index (1-based, continuation identity).
    lam : complex
        Dimensionless eigenvalue.
    energy_peV : complex
        ``eps0 * lam``; its imaginary part is ``-Gamma/2``.
    gamma_peV : float
        Width ``Gamma = -2 Im(energy) >= 0``.
    lifetime_s : float
        ``hbar / Gamma`` (inf for a stable mode).
    geometry : str
        ``direct | two_wall | inverse | box``.
    H_um : float
        Slit height used in the solve.
    q : complex
        Dimensionless boundary parameter (``(a-H)/l0`` for direct and box,
        ``a/l0`` for inverse).
    residual : float
        Modulus of the (scaled) defining equation at the returned root.
    k_per_um : complex or None
        Longitudinal-free wavenumber, box modes only.
    """

    n: int
    lam: complex
    energy_peV: complex
    gamma_peV: float
    lifetime_s: float
    geometry: str
    H_um: float
    q: complex
    residual: float = 0.0
    k_per_um: complex | None = None


# ---------------------------------------------------------------------------
# scaled building blocks
# ---------------------------------------------------------------------------

def _airy_all(z):
    """(Ai, Ai', Bi, Bi') preserving real arithmetic for real input."""
    if isinstance(z, complex) and z.imag != 0.0:
        ai, aip, bi, bip = special.airy(z)
        return complex(ai), complex(aip), complex(bi), complex(bip)
    x = float(z.real if isinstance(z, complex) else z)
    ai, aip, bi, bip = special.airy(x)
    return float(ai), float(aip), float(bi), float(bip)


def _scaled_all(w):
    """Scaled (Ai_s, Ai'_s, Bi_s, Bi'_s, s) preserving real arithmetic.

    Convention: Ai-side values carry ``exp(+s)``, Bi-side ``exp(-|s|)``,
    with the real exponent ``s = Re((2/3) w**1.5)``.
    """
    if isinstance(w, complex) and w.imag != 0.0:
        zeta = (2.0 / 3.0) * w ** 1.5
        s = zeta.real
        ai, aip, bi, bip = special.airye(w)
        phase = complex(math.cos(zeta.imag), -math.sin(zeta.imag))
        return complex(ai) * phase, complex(aip) * phase, complex(bi), complex(bip), s
    x = float(w.real if isinstance(w, complex) else w)
    if x < 0.0:
        ai, aip, bi, bip = special.airy(x)
        return float(ai), float(aip), float(bi), float(bip), 0.0
    ai, aip, bi, bip = special.airye(x)
    return float(ai), float(aip), float(bi), float(bip), (2.0 / 3.0) * x ** 1.5


def _direct_system(lam, h, q):
    """Scaled residual and exact-step derivative of the direct equation.

    Product form ``G = Ai(-lam) D(w) - Bi(-lam) N(w)`` with
    ``N = Ai - q Ai'``, ``D = Bi - q Bi'`` at ``w = h - lam``, rescaled by
    ``exp(-|s|)``; the same rescaling multiplies the derivative, so the
    Newton step G/G' is exact.
    """
    ai_m, aip_m, bi_m, bip_m = _airy_all(-lam)
    w = h - lam
    a_s, ap_s, b_s, bp_s, s = _scaled_all(w)
    damp = np.exp(-s - abs(s))          # turns Ai-side scaling into exp(-|s|)
    n_w = (a_s - q * ap_s) * damp
    d_w = b_s - q * bp_s
    np_w = (ap_s - q * w * a_s) * damp  # N'(w), using Ai'' = w Ai
    dp_w = bp_s - q * w * b_s           # D'(w)
    resid = ai_m * d_w - bi_m * n_w
    deriv = (-aip_m * d_w - ai_m * dp_w + bip_m * n_w + bi_m * np_w)
    return resid, deriv


def _inverse_system(lam, h, qa):
    """Scaled residual and exact-step derivative, inverse geometry."""
    ai_m, aip_m, bi_m, bip_m = _airy_all(-lam)
    w = h - lam
    a_s, ap_s, b_s, bp_s, s = _scaled_all(w)
    damp = np.exp(-s - abs(s))
    ai_w = a_s * damp
    aip_w = ap_s * damp
    resid = qa * (ai_w * bip_m - aip_m * b_s) - ai_m * b_s + bi_m * ai_w
    deriv = (
        qa * (-aip_w * bip_m + lam * ai_w * bi_m
              - lam * ai_m * b_s + aip_m * bp_s)
        + aip_m * b_s + ai_m * bp_s - bip_m * ai_w - bi_m * aip_w
    )
    return resid, deriv


def _newton(system, lam0, h, q, tol=1e-13, maxiter=100):
    # Convergence is declared either on a step below the relative
    # tolerance or on stagnation: once steps are tiny yet stop halving,
    # quadratic contraction has bottomed out on the residual's rounding
    # floor (which scales with |lam| and inversely with |dG/dlam|), and
    # the current iterate is as accurate as the arithmetic allows.
    lam = lam0
    prev_step = math.inf
    for _ in range(maxiter):
        resid, deriv = system(lam, h, q)
        if deriv == 0 or not (cmath.isfinite(complex(resid))
                              and cmath.isfinite(complex(deriv))):
            raise ConvergenceError(
                f"Newton derivative degenerate at h = {h:.6g}"
            )
        step = resid / deriv
        lam = lam - step
        if not cmath.isfinite(complex(lam)):
            raise ConvergenceError(
                f"Newton iterate diverged at h = {h:.6g}"
            )
        size = abs(step)
        scale = max(1.0, abs(lam))
        if size < tol * scale:
            return lam
        if size < 1e-7 * scale and size >= 0.5 * prev_step:
            return lam
        prev_step = size
    raise ConvergenceError(
        f"Newton did not converge at h = {h:.6g} (last step {abs(step):.3g})"
    )


def _residual_magnitude(system, lam, h, q) -> float:
    resid, _ = system(lam, h, q)
    return abs(resid)


def _branch_spacing(lam, h) -> float:
    """Phase-based estimate of the gap to the nearest neighbouring branch.

    The counting phase of the confined problem advances at rate
    ``sqrt(lam) - sqrt(max(lam - h, 0))`` per unit eigenvalue, so adjacent
    branches sit roughly ``pi`` apart in that phase.
    """
    lam_r = max(abs(complex(lam).real), 0.25)
    rate = math.sqrt(lam_r) - math.sqrt(max(lam_r - h, 0.0))
    return math.pi / max(rate, 1e-12)


def _representation_exponent(lam) -> float:
    """Cancellation exponent of the two-Airy-function secular determinant.

    For a complex eigenvalue the oscillatory Airy components grow like
    ``exp((2/3) |Im lam**1.5|)`` on each side of the product form, so the
    determinant is evaluated as a difference of terms about
    ``exp((4/3) |Im lam**1.5|)`` times larger than itself.  Once this
    exponent approaches ``-log(eps) ~ 36`` the residual is pure rounding
    noise and the root cannot be located in double precision.
    """
    z = complex(lam)
    if z.imag == 0.0:
        return 0.0
    return (4.0 / 3.0) * abs((z ** 1.5).imag)


def _family_step_cap(lams, max_step: float) -> float:
    """Height step keeping every tracked branch clear of its neighbours.

    In the squeezed regime a branch climbs like ``dlam/dh ~ -2 lam / h``
    while adjacent branches sit about ``2 pi sqrt(lam) / h`` apart, so a
    step of ``1 / sqrt(lam)`` moves a root roughly a third of the gap to
    its neighbour.  Larger steps can silently land a Newton polish on the
    branch below (the move then *looks* small to the jump detector in
    :func:`_advance_root`), collapsing two tracked modes onto one root.
    """
    lam_max = max((abs(complex(lam).real) for lam in lams), default=1.0)
    return min(max_step, 1.0 / math.sqrt(max(lam_max, 1.0)))


def _advance_root(system, lam, h_from, h_to, q, depth=0):
    """Move one root from ``h_from`` to ``h_to``, refining the step where
    the branch is too steep for a single Newton hop.

    With an absorbing boundary (``Im q < 0``) every physical eigenvalue
    satisfies ``Im lam <= 0``; an iterate in the upper half plane is a
    Newton escape into the rounding-noise valley of strongly damped
    branches and is treated like a branch jump.
    """
    try:
        lam_new = _newton(system, lam, h_to, q)
        jumped = abs(lam_new - lam) > 0.45 * _branch_spacing(lam, h_to)
        if (isinstance(q, complex) and q.imag < 0.0
                and complex(lam_new).imag
                > 1e-9 * max(1.0, abs(complex(lam_new)))):
            jumped = True
    except ConvergenceError:
        lam_new, jumped = None, True
    if not jumped:
        return lam_new
    if depth >= 48:
        raise ContinuationError(
            f"cannot track root across h = {h_from:.6g} -> {h_to:.6g}"
        )
    h_mid = 0.5 * (h_from + h_to)
    lam_mid = _advance_root(system, lam, h_from, h_mid, q, depth + 1)
    return _advance_root(system, lam_mid, h_mid, h_to, q, depth + 1)


def _continued_family(system, seeds, h_targets, q, max_step=0.25):
    """Track ``len(seeds)`` roots down a descending height grid.

    Returns ``{h_target: [lam_1, ..., lam_count]}``.
    """
    targets = sorted(set(float(h) for h in h_targets), reverse=True)
    h_start = max(
        max(s.real if isinstance(s, complex) else s for s in seeds) + 10.0,
        targets[0],
    )
    out: dict[float, list] = {}
    lams = [_newton(system, lam, h_start, q) for lam in seeds]
    h_prev = h_start
    for h_t in targets:
        while h_prev > h_t:
            # The cap shrinks as branches steepen so the walk is refined
            # where it matters regardless of how coarse the target grid is.
            h_next = max(h_t, h_prev - _family_step_cap(lams, max_step))
            lams = [_advance_root(system, lam, h_prev, h_next, q)
                    for lam in lams]
            h_prev = h_next
            for i in range(len(lams)):
                for j in range(i + 1, len(lams)):
                    if abs(lams[i] - lams[j]) < BIFURCATION_TOL:
                        raise ContinuationError(
                            f"modes {i + 1} and {j + 1} collided at "
                            f"h = {h_next:.6g}"
                        )
        out[h_t] = list(lams)
    return out


# ---------------------------------------------------------------------------
# public solvers
# ---------------------------------------------------------------------------

def _validate_count(count: int) -> None:
    if count < 1 or count > MAX_MODES:
        raise ValueError(f"count must satisfy 1 <= count <= {MAX_MODES}")


def _boundary_q(a: ScatteringLength | None, scales: PhysicalScales):
    if a is None:
        return 0.0
    tail = complex(a.tail_um) / scales.l0_um
    return tail.real if tail.imag == 0.0 else tail


def _package_modes(lams, geometry, H_um, q, scales, system) -> list[ComplexMode]:
    h = H_um / scales.l0_um
    modes = []
    for i, lam in enumerate(lams, start=1):
        lam_c = complex(lam)
        if lam_c.imag > 1e-9 * max(1.0, abs(lam_c)):
            raise ConvergenceError(
                f"unphysical growing mode lam = {lam_c:.6g} at H = "
                f"{H_um:.6g} um")
        energy = scales.eps0_peV * lam_c
        gamma = max(-2.0 * energy.imag, 0.0)
        modes.append(
            ComplexMode(
                n=i,
                lam=lam_c,
                energy_peV=energy,
                gamma_peV=gamma,
                lifetime_s=scales.lifetime_from_width(gamma),
                geometry=geometry,
                H_um=H_um,
                q=complex(q),
                residual=_residual_magnitude(system, lam, h, q),
            )
        )
    return modes


def solve_direct(H_um: float, a: ScatteringLength | None, count: int,
                 scales: PhysicalScales | None = None) -> list[ComplexMode]:
    """Quasi-bound modes of mirror + absorbing upper boundary at height H.

    Modes are continuation-tracked from the ideal-state regime down to the
    requested height; for ``a = None`` (or a vanishing tail value) this is
    the two-elastic-wall problem and the spectrum is exactly real.
    """
    return solve_direct_sweep([H_um], a, count, scales)[0]


def solve_direct_sweep(H_values_um, a: ScatteringLength | None, count: int,
                       scales: PhysicalScales | None = None
                       ) -> list[list[ComplexMode]]:
    """Continuation over many heights in one descending sweep.

    Returns a list of mode lists ordered like ``H_values_um``.
    """
    _validate_count(count)
    if scales is None:
        scales = neutron_scales()
    H_values = [float(H) for H in H_values_um]
    if any(H <= 0.0 for H in H_values):
        raise ValueError("heights must be positive")
    q = _boundary_q(a, scales)
    geometry = "two_wall" if (a is None or q == 0.0) else "direct"
    seeds = [float(x) for x in ai_negative_zeros(count)]
    if isinstance(q, complex):
        seeds = [complex(sd) for sd in seeds]
    h_targets = [H / scales.l0_um for H in H_values]
    sols = _continued_family(_direct_system, seeds, h_targets, q)
    return [
        _package_modes(sols[H / scales.l0_um], geometry, H, q, scales,
                       _direct_system)
        for H in H_values
    ]


def solve_two_wall(H_um: float, count: int,
                   scales: PhysicalScales | None = None) -> list[ComplexMode]:
    """Modes between two ideal walls with gravity (absorber-free limit)."""
    return solve_direct(H_um, None, count, scales)


def two_wall_roots(H_um: float, count: int,
                   scales: PhysicalScales | None = None) -> np.ndarray:
    """Two-wall eigenvalues by bracketing + bisection (independent route).

    Scans the real axis for sign changes of the two-wall residual and
    refines each bracket with Brent's method -- no Newton, no continuation,
    no analytic derivative.  Serves as a cross-check for
    :func:`solve_direct` in the elastic limit.
    """
    _validate_count(count)
    if scales is None:
        scales = neutron_scales()
    h = H_um / scales.l0_um

    def f(lam: float) -> float:
        resid, _ = _direct_system(float(lam), h, 0.0)
        return float(resid)

    roots: list[float] = []
    lam_lo = 1e-6
    step = 0.02
    f_lo = f(lam_lo)
    lam = lam_lo
    # Hard upper bound: the count-th two-wall eigenvalue is below both the
    # ideal value + squeeze and the pure-box value for the same index.
    lam_max = (float(ai_negative_zeros(count)[-1])
               + (math.pi * count / h) ** 2 + math.pi ** 2 / h ** 2 + 5.0)
    while len(roots) < count and lam < lam_max:
        lam_hi = lam + step
        f_hi = f(lam_hi)
        if f_lo == 0.0:
            roots.append(lam)
        elif f_lo * f_hi < 0.0:
            roots.append(float(optimize.brentq(f, lam, lam_hi,
                                               xtol=1e-14, rtol=8.9e-16)))
        lam, f_lo = lam_hi, f_hi
    if len(roots) < count:
        raise ConvergenceError(
            f"bracketing found only {len(roots)} of {count} roots"
        )
    return np.asarray(roots[:count])


def solve_inverse(H_um: float, a: ScatteringLength, count: int,
                  scales: PhysicalScales | None = None) -> list[ComplexMode]:
    """Modes of the inverted guide: absorber below, ideal mirror above.

    The boundary parameter is ``q_a = a/l0`` (the scattering length itself,
    not its tail value).  For small ``|q_a|`` the eigenvalues shift by
    ``+a/l0`` and every mode acquires the same width ``2 m g |Im a|``.
    """
    _validate_count(count)
    if scales is None:
        scales = neutron_scales()
    if H_um <= 0.0:
        raise ValueError("height must be positive")
    qa_c = complex(a.a_um) / scales.l0_um
    qa = qa_c.real if qa_c.imag == 0.0 else qa_c
    seeds = [float(x) + qa for x in ai_negative_zeros(count)]
    h = H_um / scales.l0_um
    sols = _continued_family(_inverse_system, seeds, [h], qa)
    return _package_modes(sols[h], "inverse", H_um, qa, scales,
                          _inverse_system)


def solve_box(H_um: float, a: ScatteringLength, count: int,
              scales: PhysicalScales | None = None) -> list[ComplexMode]:
    """Gravity-free slit modes with an absorbing upper boundary.

    Exact closed form: ``k_n = pi n/(H - tail)``, ``E_n = hbar^2 k^2/(2m)``,
    ``Gamma_n = -2 Im E_n`` (to leading order ``4 E_n |Im a|/H``, growing
    as ``n^2``).  Valid while the absorber looks sharp on the wavelength,
    i.e. small ``k_n * rho`` for a diffuse model.
    """
    _validate_count(count)
    if scales is None:
        scales = neutron_scales()
    if H_um <= 0.0:
        raise ValueError("height must be positive")
    tail = complex(a.tail_um)
    modes = []
    for n in range(1, count + 1):
        k = math.pi * n / (H_um - tail)
        energy = scales.energy_from_wavenumber(k)
        gamma = max(-2.0 * energy.imag, 0.0)
        modes.append(
            ComplexMode(
                n=n,
                lam=energy / scales.eps0_peV,
                energy_peV=energy,
                gamma_peV=gamma,
                lifetime_s=scales.lifetime_from_width(gamma),
                geometry="box",
                H_um=H_um,
                q=tail / scales.l0_um,
                residual=0.0,
                k_per_um=k,
            )
        )
    return modes


def box_width_leading(n: int, H_um: float, a: ScatteringLength,
                      scales: PhysicalScales | None = None) -> float:
    """Leading-order box width ``4 E_n^0 |Im a| / H`` in peV."""
    if scales is None:
        scales = neutron_scales()
    e0 = complex(scales.energy_from_wavenumber(math.pi * n / H_um)).real
    return 4.0 * e0 * a.im_a_um / H_um


def box_collision_rate(n: int, H_um: float,
                       scales: PhysicalScales | None = None) -> float:
    """Classical wall-collision rate of box mode n, ``v_n/(2H)``, in 1/s."""
    if scales is None:
        scales = neutron_scales()
    return math.pi * n * scales.kinetic_coefficient_peV_um2 / (
        scales.hbar_peV_s * H_um ** 2
    )


# ---------------------------------------------------------------------------
# perturbative cross-check formulas
# ---------------------------------------------------------------------------

def width_perturbative(n: int, H_um: float, a: ScatteringLength,
                       scales: PhysicalScales | None = None) -> float:
    """Analytic leakage width of state n under a wall at H (peV).

    ``Gamma_n = 2 (|Im a|/l0) eps0 sqrt(l0/H_n) sqrt(x) exp(-(4/3) x^1.5)``
    with ``x = (H - H_n)/l0``; requires the wall above the turning point.
    Equivalently ``4 (|Im a|/l0) hbar omega_n sqrt(x) exp(...)`` with the
    classical collision rate ``omega_n``.
    """
    if scales is None:
        scales = neutron_scales()
    lam_n = float(ai_negative_zeros(n)[-1])
    H_n = lam_n * scales.l0_um
    x = (H_um - H_n) / scales.l0_um
    if x <= 0.0:
        raise ValueError("wall must be above the classical turning point")
    return (
        2.0 * (a.im_a_um / scales.l0_um) * scales.eps0_peV
        * math.sqrt(scales.l0_um / H_n) * math.sqrt(x)
        * math.exp(-(4.0 / 3.0) * x ** 1.5)
    )


def shift_perturbative(n: int, H_um: float, a: ScatteringLength | None,
                       scales: PhysicalScales | None = None) -> complex:
    """Analytic eigenvalue shift of state n due to the wall at H.

    ``dlam = -(Bi(-lam)/(2 Ai'(-lam))) exp(-(4/3) x^1.5)
    (2 sqrt(x) q + 1)`` with ``q`` the dimensionless tail value (0 for an
    elastic wall -- the shift survives, it is the wall-at-H effect alone).
    """
    if scales is None:
        scales = neutron_scales()
    lam_n = float(ai_negative_zeros(n)[-1])
    x = (H_um - lam_n * scales.l0_um) / scales.l0_um
    if x <= 0.0:
        raise ValueError("wall must be above the classical turning point")
    q = 0.0 if a is None else complex(a.tail_um) / scales.l0_um
    ai_m, aip_m, bi_m, bip_m = _airy_all(-lam_n)
    shift = (
        -(bi_m / (2.0 * aip_m))
        * math.exp(-(4.0 / 3.0) * x ** 1.5)
        * (2.0 * math.sqrt(x) * q + 1.0)
    )
    return complex(shift)


@dataclass(frozen=True)
class InverseWidth:
    """Universal inverse-geometry width and lifetime."""

    gamma_peV: float
    lifetime_s: float


def inverse_width_limit(a: ScatteringLength,
                        scales: PhysicalScales | None = None) -> InverseWidth:
    """n-independent inverse-geometry width ``Gamma = 2 m g |Im a|``."""
    if scales is None:
        scales = neutron_scales()
    gamma = 2.0 * scales.mg_peV_per_um * a.im_a_um
    return InverseWidth(gamma_peV=gamma,
                        lifetime_s=scales.lifetime_from_width(gamma))


def inverse_width_deep(rho_um: float,
                       scales: PhysicalScales | None = None) -> InverseWidth:
    """Deep-imaginary-tail limit ``Gamma = m g pi rho`` of the inverse width.

    Applies when the absorber's diffuse exponential tail is fully lossy,
    so the effective ``|Im a|`` saturates at ``pi rho / 2``.
    """
    if scales is None:
        scales = neutron_scales()
    if rho_um <= 0.0:
        raise ValueError("diffuseness must be positive")
    gamma = scales.mg_peV_per_um * math.pi * rho_um
    return InverseWidth(gamma_peV=gamma,
                        lifetime_s=scales.lifetime_from_width(gamma))


# ---------------------------------------------------------------------------
# mode functions and overlaps
# ---------------------------------------------------------------------------

#: Largest Re(xi - lam) for unscaled sampling of mode functions.
_SAMPLING_LIMIT = 100.0


@dataclass
class ModeFunction:
    """Evaluator for a bilinearly normalized mode wave function.

    ``__call__(z_um)`` returns samples of psi with
    ``integral(psi^2 dz, 0..H) = 1`` (no conjugation); the arbitrary
    overall sign is fixed so the normalization constant has a positive
    real part.  Supported geometries: direct, two_wall, box.

    ``degenerate`` marks modes whose two-solution Airy representation has
    collapsed in double precision: far into the box regime with a complex
    eigenvalue, ``Bi(-lam)`` approaches ``i Ai(-lam)`` to machine accuracy
    and the top slope cancels completely, taking the closed-form
    normalization and overlaps with it.  Such modes are always damped
    below ``e^-30`` over a passage; consumers skip their cross terms.
    """

    geometry: str
    lam: complex
    h: float
    q: complex
    l0_um: float
    H_um: float
    k_per_um: complex | None = None
    norm: complex = field(init=False)
    degenerate: bool = field(init=False)
    _ai_m: complex = field(init=False)
    _bi_m: complex = field(init=False)
    _yph: complex = field(init=False)

    def __post_init__(self) -> None:
        if self.geometry == "inverse":
            raise NotImplementedError(
                "inverse-geometry transmission uses only mode widths; "
                "its wave functions are not sampled"
            )
        self.degenerate = False
        if self.geometry == "box":
            k = self.k_per_um
            if k is None:
                raise ValueError("box mode function needs k_per_um")
            if abs(k) * self.H_um < 1e-12:
                raise ValueError("degenerate box wavenumber")
            integral = self.H_um / 2.0 - np.sin(2.0 * k * self.H_um) / (4.0 * k)
            self._ai_m = self._bi_m = self._yph = 0.0j
        else:
            ai_m, aip_m, bi_m, bip_m = _airy_all(-self.lam
                                                 if isinstance(self.lam, complex)
                                                 else -float(self.lam))
            self._ai_m, self._bi_m = complex(ai_m), complex(bi_m)
            self._yph = complex(self._top_slope_raw())
            if not cmath.isfinite(self._yph) or abs(self._yph) > 1e150:
                self._yph = 0.0j
                self.degenerate = True
            w_h = self.h - self.lam
            int_xi = (1.0 / math.pi ** 2
                      - self._yph ** 2 * (1.0 - self.q ** 2 * w_h))
            integral = self.l0_um * int_xi
        if not cmath.isfinite(complex(integral)) or integral == 0.0:
            self.degenerate = True
            integral = 1.0
        norm = complex(1.0) / np.sqrt(complex(integral))
        if norm.real < 0.0 or (norm.real == 0.0 and norm.imag < 0.0):
            norm = -norm
        self.norm = complex(norm)

    # -- raw (unnormalized) family values in dimensionless height ----------

    def _top_slope_raw(self) -> complex:
        """y'(h) of the raw combination, via scaled values.

        Ai-side scaled values carry ``exp(+s)`` and Bi-side ``exp(-|s|)``,
        so the true slope needs ``exp(-s)`` and ``exp(+|s|)`` respectively;
        the two differ below the turning point (``s < 0``).
        """
        a_s, ap_s, b_s, bp_s, s = _scaled_all(complex(self.h - self.lam))
        if s > 700.0:
            # deeply bound: the slope underflows and the norm integral is
            # dominated by the interior term 1/pi^2 exactly
            return 0.0
        if s < -700.0:
            self.degenerate = True
            return 0.0
        t_ai = self._bi_m * ap_s * np.exp(-s)
        t_bi = self._ai_m * bp_s * np.exp(abs(s))
        slope = t_ai - t_bi
        magnitude = abs(t_ai) + abs(t_bi)
        if magnitude > 0.0 and abs(slope) < 1e-12 * magnitude:
            self.degenerate = True
        return slope

    def raw_value(self, xi) -> np.ndarray:
        """Unnormalized y(xi) = Bi(-lam) Ai(xi-lam) - Ai(-lam) Bi(xi-lam)."""
        w = np.asarray(xi, dtype=complex) - self.lam
        if np.any(w.real > _SAMPLING_LIMIT):
            raise ValueError(
                "sampling argument too far above the turning point for "
                "unscaled evaluation"
            )
        ai, aip, bi, bip = special.airy(w)
        return self._bi_m * ai - self._ai_m * bi

    def raw_derivative(self, xi) -> np.ndarray:
        """d/dxi of :meth:`raw_value`."""
        w = np.asarray(xi, dtype=complex) - self.lam
        if np.any(w.real > _SAMPLING_LIMIT):
            raise ValueError(
                "sampling argument too far above the turning point for "
                "unscaled evaluation"
            )
        ai, aip, bi, bip = special.airy(w)
        return self._bi_m * aip - self._ai_m * bip

    # -- normalized physical values ----------------------------------------

    def __call__(self, z_um) -> np.ndarray:
        z = np.asarray(z_um, dtype=float)
        if self.geometry == "box":
            vals = np.sin(self.k_per_um * z.astype(complex))
        else:
            vals = self.raw_value(z / self.l0_um)
        out = self.norm * vals
        is_real = (complex(self.lam).imag == 0.0
                   and complex(self.q).imag == 0.0
                   and (self.k_per_um is None
                        or complex(self.k_per_um).imag == 0.0))
        return out.real if is_real else out


def mode_function(mode: ComplexMode,
                  scales: PhysicalScales | None = None) -> ModeFunction:
    """Build the normalized wave-function evaluator for a solved mode."""
    if scales is None:
        scales = neutron_scales()
    return ModeFunction(
        geometry=mode.geometry,
        lam=complex(mode.lam),
        h=mode.H_um / scales.l0_um,
        q=complex(mode.q),
        l0_um=scales.l0_um,
        H_um=mode.H_um,
        k_per_um=mode.k_per_um,
    )


def _airy_pair_integral_xi(fa: ModeFunction, fb: ModeFunction) -> complex:
    """Bilinear integral of two *raw* same-guide Airy modes over [0, h].

    Exact endpoint identity for Airy-equation solutions with parameters
    ``lam_a != lam_b`` and ``y(0) = 0``:
    ``integral = y_a'(h) y_b'(h) (q_b - q_a) / (lam_b - lam_a)``.
    """
    dlam = fb.lam - fa.lam
    return complex(fa._yph * fb._yph * (fb.q - fa.q) / dlam)


def _airy_diag_integral_xi(fa: ModeFunction, fb: ModeFunction) -> complex:
    """Same-parameter limit of the bilinear integral (norm-type form)."""
    w_h = fa.h - fa.lam
    return complex(1.0 / math.pi ** 2
                   - fa._yph * fb._yph * (1.0 - fa.q * fb.q * w_h))


def _box_pair_integral(ka: complex, kb: complex, H: float) -> complex:
    """Exact integral of sin(ka z) sin(kb z) over [0, H]."""
    ka = complex(ka)
    kb = complex(kb)
    if abs(ka - kb) * H < 1e-9:
        return H / 2.0 - np.sin(2.0 * kb * H) / (4.0 * kb)
    return (np.sin((ka - kb) * H) / (2.0 * (ka - kb))
            - np.sin((ka + kb) * H) / (2.0 * (ka + kb)))


def overlap_biorthogonal(fa: ModeFunction, fb: ModeFunction) -> complex:
    """Bilinear overlap ``integral(psi_a psi_b dz)`` (no conjugation).

    For two distinct modes of one family this vanishes identically (the
    top-wall condition does not involve the eigenvalue) and equals 1 on
    the diagonal by normalization; both facts fall out of the closed forms
    evaluated here rather than being hard-coded.
    """
    if fa.geometry == "box" and fb.geometry == "box":
        val = _box_pair_integral(fa.k_per_um, fb.k_per_um, fa.H_um)
        return complex(fa.norm * fb.norm * val)
    if abs(complex(fa.lam) - complex(fb.lam)) < 1e-12:
        val = fa.l0_um * _airy_diag_integral_xi(fa, fb)
    else:
        val = fa.l0_um * _airy_pair_integral_xi(fa, fb)
    return complex(fa.norm * fb.norm * val)


def _conjugate_mode(f: ModeFunction) -> ModeFunction:
    return ModeFunction(
        geometry=f.geometry,
        lam=complex(f.lam).conjugate(),
        h=f.h,
        q=complex(f.q).conjugate(),
        l0_um=f.l0_um,
        H_um=f.H_um,
        k_per_um=(None if f.k_per_um is None
                  else complex(f.k_per_um).conjugate()),
    )


def overlap_hermitian(fa: ModeFunction, fb: ModeFunction) -> complex:
    """Conjugated overlap ``<psi_a|psi_b> = integral(conj(psi_a) psi_b dz)``.

    For real modes this coincides with the bilinear overlap; for complex
    modes it does not, and it is the quantity the interference flux
    consumes.
    """
    fa_c = _conjugate_mode(fa)
    return overlap_biorthogonal(fa_c, fb)


# ---------------------------------------------------------------------------
# eigenvalue derivative (closed form)
# ---------------------------------------------------------------------------

def dlambda_dh_two_wall(lam: float, h: float) -> float:
    """Exact ``d lambda / d h`` of a two-wall eigenvalue (dimensionless).

    By implicit differentiation of the two-wall equation, rescaled to be
    overflow-free (``E = exp(-s - |s|)``, ``w = h - lam``)::

        d lam/d h = [Ai'(w) E Bi(-lam) - Bi'(w) e^{-|s|} Ai(-lam)] /
                    [ ... + Ai(w) E Bi'(-lam) - Bi(w) e^{-|s|} Ai'(-lam)]

    where the common factor ``e^{-|s|}`` cancels in the ratio.
    """
    lam_f = float(lam)
    ai_m, aip_m, bi_m, bip_m = _airy_all(-lam_f)
    a_s, ap_s, b_s, bp_s, s = _scaled_all(h - lam_f)
    damp = math.exp(-s - abs(s))
    num = ap_s * damp * bi_m - bp_s * ai_m
    den = num + a_s * damp * bip_m - b_s * aip_m
    return float(num / den)
