"""Transmitted-flux engines for every guide geometry.

Four flux models are provided:

interference flux
    Exact exit flux for a single longitudinal velocity: a double sum over
    quasi-bound modes with oscillating cross terms, built from conjugated
    (Hermitian) overlaps.  Averaging it over a broad longitudinal-velocity
    distribution (deterministic Gauss-Hermite quadrature, or Monte Carlo
    for validation) washes the cross terms out.

averaged flux
    The broad-distribution limit assembled directly: a diagonal sum of
    ``exp(-Gamma_n tau)`` plus residual transversal-interference terms
    weighted by squared Hermitian overlaps, under the uniform-population
    assumption for the lowest modes.

quantum step model
    The semiclassical staircase ``F(H) = sum A_n exp(-tau/tau_n_long(H))``
    built on the barrier-leakage lifetime; this is the functional form the
    fitting module adjusts to data.

zero-gravity box flux
    Closed-form flux for the gravity-free slit with its strong / weak /
    no-absorption regimes, the critical height separating them, and the
    forced unit-absorption variant.

All overlaps entering flux formulas are Hermitian overlaps *normalized by
the Hermitian self-overlaps*, which makes every diagonal factor exactly 1
(for real elastic modes the normalization factor is identically 1, and
distinct same-family modes contribute no cross terms at all).  Realness
of the assembled flux is verified numerically, never assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import eigen
from .absorber import ScatteringLength
from .airy import ai_negative_zeros
from .eigen import (
    ComplexMode,
    ModeFunction,
    inverse_width_limit,
    mode_function,
    overlap_hermitian,
)
from .gravspec import count_states_wkb, tau_long_lambda
from .scales import PhysicalScales, neutron_scales

__all__ = [
    "VelocityDistribution",
    "WaveguideConfig",
    "FluxCurve",
    "InterferenceFlux",
    "AveragedFluxPoint",
    "ZeroGravityFlux",
    "expansion_coefficients",
    "normalized_overlap_matrix",
    "flux_interference",
    "flux_interference_velocity_averaged",
    "flux_averaged",
    "averaged_flux_curve",
    "step_model_flux",
    "step_model_curve",
    "flux_zero_gravity",
    "zero_gravity_flux_curve",
    "critical_height",
    "flux_ratio_inverse",
    "inverse_flux_curve",
]

#: Per-mode damping exponent beyond which a mode is dropped from sums.
TRUNCATION_EXPONENT = 40.0

#: Exponent beyond which a mode is permanently dropped from a descending
#: continuation sweep (its width only grows as the slit narrows).
SWEEP_DROP_EXPONENT = 400.0

#: Airy-cancellation exponent beyond which a strongly damped mode becomes
#: untrackable in double precision and is dropped from sweeps early.
REPRESENTATION_DROP_EXPONENT = 22.0

#: Damping-exponent excess over the least-damped live mode beyond which a
#: mode's relative flux contribution (< exp(-20) ~ 2e-9, orders of
#: magnitude under every quoted tolerance) no longer matters; such modes
#: may be dropped from sweeps when untrackable.
RELATIVE_DROP_EXPONENT = 20.0

#: Default number of Gauss-Hermite nodes for velocity averaging.
GH_NODES = 16


# ---------------------------------------------------------------------------
# configuration types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VelocityDistribution:
    """Incoming-beam velocity model.

    Attributes
    ----------
    V_ms : float
        Mean longitudinal velocity (m/s).
    delta_V_over_V : float
        Relative Gaussian spread of the longitudinal velocity; ``0`` means
        a delta distribution (single velocity).  Must lie in ``[0, 1)``.
    k0_per_um : float
        Transversal momentum-distribution width (1/um); the default makes
        ``k0 * l0`` about 50, which justifies uniform populations of the
        low modes.
    """

    V_ms: float
    delta_V_over_V: float = 0.0
    k0_per_um: float = 8.5165

    def __post_init__(self) -> None:
        if self.V_ms <= 0.0:
            raise ValueError("mean velocity must be positive")
        if not 0.0 <= self.delta_V_over_V < 1.0:
            raise ValueError("delta_V_over_V must lie in [0, 1)")
        if self.k0_per_um <= 0.0:
            raise ValueError("transversal width must be positive")


_GEOMETRIES = ("direct", "inverse", "zero_gravity")


@dataclass(frozen=True)
class WaveguideConfig:
    """Geometry and beam parameters of one guide configuration.

    ``tau_pass_s = L/V`` is derived, not stored; the bench-top defaults
    give a passage time near 2e-2 s.
    """

    H_um: float
    L_cm: float
    V_ms: float
    geometry: str
    absorber: ScatteringLength | None
    incoming: VelocityDistribution

    def __post_init__(self) -> None:
        if self.H_um <= 0.0:
            raise ValueError("slit height must be positive")
        if self.L_cm <= 0.0:
            raise ValueError("guide length must be positive")
        if self.V_ms <= 0.0:
            raise ValueError("velocity must be positive")
        if self.geometry not in _GEOMETRIES:
            raise ValueError(f"geometry must be one of {_GEOMETRIES}")

    @property
    def tau_pass_s(self) -> float:
        """Passage time ``L/V`` in seconds."""
        return self.L_cm * 1e-2 / self.V_ms

    def at_height(self, H_um: float) -> "WaveguideConfig":
        """Copy of this configuration at a different slit height."""
        return WaveguideConfig(H_um, self.L_cm, self.V_ms, self.geometry,
                               self.absorber, self.incoming)


@dataclass(frozen=True)
class FluxCurve:
    """Sampled flux curve with per-point bookkeeping.

    ``F`` is the raw (unnormalized) flux; ``F / F_star`` is the reported
    relative flux.  ``mode_terms[i]`` holds the per-mode diagonal
    contributions at ``H_um[i]`` (padded with zeros up to the widest
    point) and ``interference[i]`` the residual cross-term total, so that
    ``F = mode_terms.sum(axis=1) + interference`` exactly.
    """

    H_um: np.ndarray
    F: np.ndarray
    mode_terms: np.ndarray
    interference: np.ndarray
    F_star: float = 1.0
    regimes: tuple[str, ...] = ()
    mode_counts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if np.any(self.F < -1e-12):
            raise ValueError("flux must be non-negative")
        if self.F_star <= 0.0:
            raise ValueError("normalization reference must be positive")

    @property
    def F_rel(self) -> np.ndarray:
        """Flux relative to the declared reference ``F_star``."""
        return self.F / self.F_star

    def with_reference(self, H_ref_um: float) -> "FluxCurve":
        """Same curve renormalized so ``F_rel = 1`` at the sample nearest
        ``H_ref_um``."""
        idx = int(np.argmin(np.abs(self.H_um - H_ref_um)))
        ref = float(self.F[idx])
        if ref <= 0.0:
            raise ValueError("reference point has zero flux")
        return FluxCurve(self.H_um, self.F, self.mode_terms,
                         self.interference, ref, self.regimes,
                         self.mode_counts)


# ---------------------------------------------------------------------------
# expansion coefficients and overlap matrices
# ---------------------------------------------------------------------------

def expansion_coefficients(z_um: np.ndarray, entry_values: np.ndarray,
                           functions: list[ModeFunction]) -> np.ndarray:
    """Expansion factors of an entry wave function over guide modes.

    ``C_n = integral(Psi(x=0, z) psi_n(z) dz)`` with *no* conjugation (the
    modes are bilinearly orthonormal, not Hermitian-orthonormal), computed
    by trapezoidal quadrature on the provided grid.  Because the mode
    basis is not self-conjugate, ``sum |C_n|^2`` need not equal the entry
    norm.
    """
    z = np.asarray(z_um, dtype=float)
    psi0 = np.asarray(entry_values)
    if z.ndim != 1 or z.shape != psi0.shape:
        raise ValueError("grid and samples must be matching 1-D arrays")
    return np.array(
        [complex(np.trapezoid(psi0 * f(z), z)) for f in functions]
    )


def normalized_overlap_matrix(functions: list[ModeFunction]) -> np.ndarray:
    """Hermitian overlap matrix normalized by the self-overlaps.

    ``O[n, k] = <psi_n|psi_k> / sqrt(<psi_n|psi_n> <psi_k|psi_k>)``; the
    diagonal is exactly 1 and ``O`` is a Hermitian matrix.  For real
    (elastic) same-family modes this is the identity.  Cross terms of
    representation-degenerate modes (see ``ModeFunction.degenerate``) are
    set to zero: their closed forms are meaningless and their physical
    weight is below ``e^-30``.
    """
    n = len(functions)
    usable = [not f.degenerate for f in functions]
    selfs = np.array([overlap_hermitian(f, f) if ok else 1.0
                      for f, ok in zip(functions, usable)])
    if np.any(np.abs(selfs) == 0.0) or not np.all(np.isfinite(selfs)):
        raise ValueError("mode with vanishing self-overlap")
    out = np.eye(n, dtype=complex)
    for i in range(n):
        for j in range(i + 1, n):
            if not (usable[i] and usable[j]):
                continue
            val = overlap_hermitian(functions[i], functions[j]) / np.sqrt(
                selfs[i] * selfs[j]
            )
            out[i, j] = val
            out[j, i] = np.conj(val)
    return out


def _truncate_modes(modes: list[ComplexMode], tau_s: float,
                    scales: PhysicalScales) -> list[ComplexMode]:
    """Prefix of the mode list with damping exponent <= the truncation cap
    (the first mode is always kept)."""
    kept = []
    for m in modes:
        if m.gamma_peV * tau_s / scales.hbar_peV_s > TRUNCATION_EXPONENT \
                and kept:
            break
        kept.append(m)
    return kept


# ---------------------------------------------------------------------------
# interference flux (single velocity) and its velocity average
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InterferenceFlux:
    """Exit flux with interference bookkeeping.

    ``F = diagonal.sum() + cross`` exactly; ``overlap`` is the normalized
    Hermitian overlap matrix used.
    """

    F: float
    diagonal: np.ndarray
    cross: float
    overlap: np.ndarray


def _interference_sum(tau_s: float, C: np.ndarray, O: np.ndarray,
                      eps_peV: np.ndarray, gam_peV: np.ndarray,
                      hbar: float) -> tuple[float, np.ndarray]:
    """Double-sum flux and its diagonal at one passage time."""
    phase = np.exp(1j * (eps_peV[:, None] - eps_peV[None, :]) * tau_s / hbar)
    damp = np.exp(-(gam_peV[:, None] + gam_peV[None, :]) * tau_s / (2.0 * hbar))
    matrix = np.conj(C)[:, None] * C[None, :] * O * phase * damp
    total = complex(matrix.sum())
    scale = max(abs(total), float(np.abs(matrix).sum()), 1e-300)
    if abs(total.imag) > 1e-10 * scale:
        raise ArithmeticError(
            f"interference flux acquired imaginary part {total.imag:.3e}"
        )
    diagonal = np.real(np.diag(matrix))
    return total.real, diagonal


def flux_interference(config: WaveguideConfig, modes: list[ComplexMode],
                      coefficients: np.ndarray,
                      scales: PhysicalScales | None = None
                      ) -> InterferenceFlux:
    """Exit flux for a single longitudinal velocity (no averaging).

    The double sum over modes keeps the oscillating cross terms
    ``conj(C_n) C_k <psi_n|psi_k> exp(-i(eps_k - eps_n) tau)`` damped by
    the mean widths; the bracket is the conjugated (Hermitian) overlap,
    normalized so the diagonal factors are exactly 1.  The result is real
    up to round-off, which is checked, not assumed.
    """
    if scales is None:
        scales = neutron_scales()
    if config.incoming.delta_V_over_V != 0.0:
        raise ValueError(
            "single-velocity flux requires a delta velocity distribution; "
            "use flux_interference_velocity_averaged for a spread beam"
        )
    C = np.asarray(coefficients, dtype=complex)
    if len(C) != len(modes):
        raise ValueError("one coefficient per mode required")
    funcs = [mode_function(m, scales) for m in modes]
    O = normalized_overlap_matrix(funcs)
    eps = np.array([m.energy_peV.real for m in modes])
    gam = np.array([m.gamma_peV for m in modes])
    F, diag = _interference_sum(config.tau_pass_s, C, O, eps, gam,
                                scales.hbar_peV_s)
    return InterferenceFlux(F=F, diagonal=diag, cross=F - float(diag.sum()),
                            overlap=O)


def flux_interference_velocity_averaged(
    config: WaveguideConfig,
    modes: list[ComplexMode],
    coefficients: np.ndarray,
    method: str = "gauss-hermite",
    n_nodes: int = GH_NODES,
    n_samples: int = 4000,
    seed: int | None = None,
    scales: PhysicalScales | None = None,
) -> InterferenceFlux:
    """Interference flux averaged over the longitudinal-velocity spread.

    ``method="gauss-hermite"`` uses deterministic Gauss-Hermite quadrature
    (default 16 nodes) over the Gaussian velocity distribution;
    ``method="monte-carlo"`` draws ``n_samples`` velocities with the given
    ``seed`` and serves as a statistical validation route.  Nodes or draws
    at nonpositive velocity (possible only for very broad spreads, with
    negligible weight) are discarded and the weights renormalized.
    """
    if scales is None:
        scales = neutron_scales()
    C = np.asarray(coefficients, dtype=complex)
    if len(C) != len(modes):
        raise ValueError("one coefficient per mode required")
    rel = config.incoming.delta_V_over_V
    V0 = config.incoming.V_ms
    L_m = config.L_cm * 1e-2
    if method == "gauss-hermite":
        x, w = np.polynomial.hermite.hermgauss(n_nodes)
        velocities = V0 * (1.0 + math.sqrt(2.0) * rel * x)
        weights = w / math.sqrt(math.pi)
    elif method == "monte-carlo":
        rng = np.random.default_rng(seed)
        velocities = rng.normal(V0, rel * V0, size=n_samples)
        weights = np.full(n_samples, 1.0 / n_samples)
    else:
        raise ValueError("method must be 'gauss-hermite' or 'monte-carlo'")
    keep = velocities > 0.0
    velocities, weights = velocities[keep], weights[keep]
    if velocities.size == 0:
        raise ValueError("velocity distribution has no positive support")
    weights = weights / weights.sum()

    funcs = [mode_function(m, scales) for m in modes]
    O = normalized_overlap_matrix(funcs)
    eps = np.array([m.energy_peV.real for m in modes])
    gam = np.array([m.gamma_peV for m in modes])
    F_acc = 0.0
    diag_acc = np.zeros(len(modes))
    for V, wt in zip(velocities, weights):
        F_v, diag_v = _interference_sum(L_m / V, C, O, eps, gam,
                                        scales.hbar_peV_s)
        F_acc += wt * F_v
        diag_acc += wt * diag_v
    return InterferenceFlux(F=F_acc, diagonal=diag_acc,
                            cross=F_acc - float(diag_acc.sum()), overlap=O)


# ---------------------------------------------------------------------------
# averaged flux (broad distributions)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AveragedFluxPoint:
    """Broad-distribution flux at one height, with bookkeeping."""

    H_um: float
    F: float
    mode_terms: np.ndarray
    interference: float
    included: int


def flux_averaged(config: WaveguideConfig, modes: list[ComplexMode],
                  scales: PhysicalScales | None = None) -> AveragedFluxPoint:
    """Broad-distribution exit flux at one height.

    Uniform unit populations for the included modes; diagonal terms
    ``exp(-Gamma_n tau)`` plus residual transversal-interference cross
    terms ``2 Re(<psi_n|psi_k>^2 exp(i omega_nk tau))`` damped by the mean
    widths.  Modes are truncated once their damping exponent exceeds the
    module cap (contribution below e^-40); the included count is recorded.
    """
    if scales is None:
        scales = neutron_scales()
    tau = config.tau_pass_s
    hbar = scales.hbar_peV_s
    kept = _truncate_modes(modes, tau, scales)
    eps = np.array([m.energy_peV.real for m in kept])
    gam = np.array([m.gamma_peV for m in kept])
    diag = np.exp(-gam * tau / hbar)
    cross = 0.0
    if len(kept) > 1 and any(abs(m.lam.imag) > 0.0 for m in kept):
        funcs = [mode_function(m, scales) for m in kept]
        O = normalized_overlap_matrix(funcs)
        for i in range(len(kept)):
            for j in range(i + 1, len(kept)):
                omega = (eps[i] - eps[j]) / hbar
                term = (O[i, j] ** 2) * np.exp(1j * omega * tau)
                cross += 2.0 * term.real * math.exp(
                    -(gam[i] + gam[j]) * tau / (2.0 * hbar)
                )
    return AveragedFluxPoint(
        H_um=config.H_um,
        F=float(diag.sum() + cross),
        mode_terms=diag,
        interference=float(cross),
        included=len(kept),
    )


def _pack_curve(H_values: np.ndarray, points: list[AveragedFluxPoint],
                regimes: tuple[str, ...] = ()) -> FluxCurve:
    width = max(len(p.mode_terms) for p in points)
    terms = np.zeros((len(points), width))
    for i, p in enumerate(points):
        terms[i, : len(p.mode_terms)] = p.mode_terms
    return FluxCurve(
        H_um=np.asarray(H_values, dtype=float),
        F=np.array([p.F for p in points]),
        mode_terms=terms,
        interference=np.array([p.interference for p in points]),
        regimes=regimes,
        mode_counts=tuple(p.included for p in points),
    )


def averaged_flux_curve(H_values_um, config_template: WaveguideConfig,
                        count: int | None = None,
                        scales: PhysicalScales | None = None) -> FluxCurve:
    """Broad-distribution flux curve over a height range.

    Runs one descending continuation sweep of the direct-geometry solver
    over all requested heights, permanently dropping a mode from the live
    family once its damping exponent passes the sweep cap (widths only
    grow as the slit narrows, so a dropped mode can never matter again at
    lower heights), then assembles each point with :func:`flux_averaged`.

    A mode whose transmission exponent already exceeds the truncation cap
    (contribution below ``exp(-40)``) is also dropped as soon as its
    complex eigenvalue becomes numerically untrackable -- either because
    the Airy cancellation exponent passes
    :data:`REPRESENTATION_DROP_EXPONENT` or because continuation fails
    outright.  Continuation failures on modes that could still contribute
    are re-raised.  If the whole family, ground state included, is beyond
    the truncation cap and untrackable, the eigenvalues are frozen and the
    remaining points inherit their (vanishing) flux.
    """
    if scales is None:
        scales = neutron_scales()
    H_values = np.sort(np.asarray(H_values_um, dtype=float))[::-1].copy()
    if H_values.size == 0:
        raise ValueError("empty height range")
    if np.any(H_values <= 0.0):
        raise ValueError("heights must be positive")
    if count is None:
        count = int(min(eigen.MAX_MODES,
                        max(4.0, math.ceil(count_states_wkb(
                            float(H_values[0]), scales)) + 4)))
    tau = config_template.tau_pass_s
    q = eigen._boundary_q(config_template.absorber, scales)
    geometry = "two_wall" if (config_template.absorber is None or q == 0.0) \
        else "direct"
    seeds = [float(x) for x in ai_negative_zeros(count)]
    if isinstance(q, complex):
        seeds = [complex(s) for s in seeds]
    families = _swept_modes(eigen._direct_system, seeds, q, geometry,
                            H_values, tau, scales)
    points = [flux_averaged(config_template.at_height(float(H)), modes,
                            scales)
              for H, modes in zip(H_values, families)]
    order = np.argsort(H_values)
    return _pack_curve(H_values[order], [points[i] for i in order])


def _drop_collapsed(advanced, kept_idx, d_min, tau, scales, h_next):
    """Remove duplicates left by a branch collapsing onto a lower one.

    A later entry matching an earlier root has lost its own branch; the
    duplicate double-counts the surviving branch and carries a damping
    rate *below* that of the branch it abandoned.  The orphan is subject
    to the same policy as an untrackable branch: dropped when negligible
    (judged from the collapsed value, which understates the true damping,
    so this errs toward raising), fatal otherwise.
    """
    pruned: list[complex] = []
    pruned_idx: list[int] = []
    for lam, idx in zip(advanced, kept_idx):
        tol = max(eigen.BIFURCATION_TOL, 1e-9 * abs(complex(lam)))
        if not any(abs(lam - prev) < tol for prev in pruned):
            pruned.append(lam)
            pruned_idx.append(idx)
            continue
        damp = (2.0 * abs(complex(lam).imag) * scales.eps0_peV
                * tau / scales.hbar_peV_s)
        if (damp > TRUNCATION_EXPONENT
                or damp - d_min > RELATIVE_DROP_EXPONENT):
            continue
        raise eigen.ContinuationError(
            f"mode {idx + 1} collapsed onto a lower branch at "
            f"h = {h_next:.6g}"
        )
    return pruned, pruned_idx


def _swept_modes(system, seeds, q, geometry, H_values_desc, tau, scales
                 ) -> list[list[ComplexMode]]:
    """One descending continuation sweep; mode lists per requested height.

    Implements the drop policy documented on :func:`averaged_flux_curve`:
    permanent removal past :data:`SWEEP_DROP_EXPONENT`, early removal of
    negligible untrackable (or branch-collapsed) modes, freezing once the
    whole family is negligible.  Mode labels ``n`` keep their original
    (1-based) seed positions across drops.
    """
    h_targets = [float(H) / scales.l0_um for H in H_values_desc]
    h_start = max(max(s.real if isinstance(s, complex) else s
                      for s in seeds) + 10.0, h_targets[0])
    live = [eigen._newton(system, lam, h_start, q) for lam in seeds]
    live_idx = list(range(len(seeds)))
    families: list[list[ComplexMode]] = []
    h_prev = h_start
    frozen = False
    for H, h_t in zip(H_values_desc, h_targets):
        while not frozen and h_prev > h_t:
            # Adaptive cap: the internal walk refines itself where branches
            # steepen, so tracking fidelity does not depend on how coarse
            # the requested height grid is.
            h_next = max(h_t, h_prev - eigen._family_step_cap(live, 0.25))
            advanced: list[complex] = []
            kept_idx: list[int] = []
            damps = [2.0 * abs(complex(lam).imag) * scales.eps0_peV
                     * tau / scales.hbar_peV_s for lam in live]
            d_min = min(damps)
            for lam, idx, damp in zip(live, live_idx, damps):
                negligible = (damp > TRUNCATION_EXPONENT
                              or damp - d_min > RELATIVE_DROP_EXPONENT)
                if negligible and (eigen._representation_exponent(lam)
                                   > REPRESENTATION_DROP_EXPONENT):
                    continue
                try:
                    advanced.append(eigen._advance_root(
                        system, lam, h_prev, h_next, q))
                except eigen.ContinuationError:
                    if negligible:
                        continue
                    raise
                kept_idx.append(idx)
            if not advanced:
                # Every remaining mode -- ground state included -- is both
                # beyond the truncation cap and numerically untrackable.
                # Widths only grow at lower heights, so every remaining
                # point has flux below exp(-TRUNCATION_EXPONENT); freeze
                # the family (stale eigenvalues, absolute error < 1e-17)
                # instead of failing the whole curve.
                frozen = True
                break
            live, live_idx = _drop_collapsed(advanced, kept_idx, d_min,
                                             tau, scales, h_next)
            h_prev = h_next
        modes = eigen._package_modes(live, geometry, float(H), q, scales,
                                     system)
        # restore continuation labels after drops (1-based)
        modes = [ComplexMode(
            n=live_idx[i] + 1, lam=m.lam, energy_peV=m.energy_peV,
            gamma_peV=m.gamma_peV, lifetime_s=m.lifetime_s,
            geometry=m.geometry, H_um=m.H_um, q=m.q, residual=m.residual,
        ) for i, m in enumerate(modes)]
        families.append(modes)
        keep = [i for i, m in enumerate(modes)
                if m.gamma_peV * tau / scales.hbar_peV_s
                <= SWEEP_DROP_EXPONENT]
        if not keep:
            keep = [0]
        live = [live[i] for i in keep]
        live_idx = [live_idx[i] for i in keep]
    return families


# ---------------------------------------------------------------------------
# quantum step model
# ---------------------------------------------------------------------------

def step_model_flux(H_um: float, lambdas, amplitudes, tau_pass_s: float,
                    scales: PhysicalScales | None = None) -> float:
    """Semiclassical staircase flux ``sum A_n exp(-tau / tau_n_long(H))``.

    ``lambdas`` are free threshold eigenvalues (strictly increasing),
    ``amplitudes`` the per-state populations; each term switches on as the
    slit height crosses the state's turning point, producing the step
    structure the fit adjusts to data.
    """
    if scales is None:
        scales = neutron_scales()
    lam = np.asarray(lambdas, dtype=float)
    amp = np.asarray(amplitudes, dtype=float)
    if lam.shape != amp.shape or lam.ndim != 1 or lam.size == 0:
        raise ValueError("lambdas and amplitudes must be matching 1-D arrays")
    if np.any(np.diff(lam) <= 0.0):
        raise ValueError("threshold eigenvalues must be strictly increasing")
    if np.any(lam <= 0.0):
        raise ValueError("threshold eigenvalues must be positive")
    total = 0.0
    for lam_n, a_n in zip(lam, amp):
        ratio = tau_pass_s / tau_long_lambda(float(lam_n), H_um, scales)
        total += a_n * math.exp(-min(ratio, 745.0))
    return total


def step_model_curve(H_values_um, lambdas, amplitudes, tau_pass_s: float,
                     scales: PhysicalScales | None = None) -> np.ndarray:
    """Vector of :func:`step_model_flux` values over a height grid."""
    return np.array([
        step_model_flux(float(H), lambdas, amplitudes, tau_pass_s, scales)
        for H in np.asarray(H_values_um, dtype=float)
    ])


# ---------------------------------------------------------------------------
# zero-gravity (box) flux
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroGravityFlux:
    """Gravity-free slit flux at one height with regime bookkeeping."""

    H_um: float
    F: float
    xi_abs: float
    n_pass: float
    regime: str
    included: int


def _xi_abs(H_um: float, im_a_um: float, tau_s: float,
            scales: PhysicalScales) -> float:
    """Absorption constant of the gravity-free slit (dimensionless).

    ``xi_abs = 4 pi^2 tau |Im a| (hbar/2m) / H^3`` with ``hbar/2m``
    expressed through the unit anchors as ``eps0 l0^2 / hbar``.
    """
    return (4.0 * math.pi ** 2 * tau_s * im_a_um
            * scales.kinetic_coefficient_peV_um2
            / (scales.hbar_peV_s * H_um ** 3))


def flux_zero_gravity(config: WaveguideConfig,
                      forced_unit_absorption: bool = False,
                      scales: PhysicalScales | None = None
                      ) -> ZeroGravityFlux:
    """Transmitted flux of the gravity-free slit at one height.

    Homogeneously populated box modes up to ``N_h = k0 H`` decay with
    exponent ``xi_abs n^2`` (quantum threshold absorption) giving
    ``F = sum exp(-xi_abs n^2)``; regimes: ``strong`` for ``xi_abs > 1``
    (single-term, rapidly rising flux), ``no-absorption`` when even the
    highest populated mode barely decays (``xi_abs (k0 H)^2 < 1``, flux
    proportional to the slit height), ``weak`` in between (flux following
    the 3/2-power law).  ``forced_unit_absorption=True`` replaces the
    threshold law with one full loss per wall collision, exponent
    ``omega_n tau`` linear in ``n``, which steepens the height dependence
    to the 2nd power.
    """
    if scales is None:
        scales = neutron_scales()
    if config.geometry != "zero_gravity":
        raise ValueError("configuration must use the zero_gravity geometry")
    if config.absorber is None:
        raise ValueError("zero-gravity flux needs an absorber")
    H = config.H_um
    tau = config.tau_pass_s
    im_a = config.absorber.im_a_um
    if im_a <= 0.0 and not forced_unit_absorption:
        raise ValueError("absorber must have a nonzero imaginary part")
    xi = _xi_abs(H, im_a, tau, scales)
    n_h = max(1, int(math.floor(config.incoming.k0_per_um * H)))
    total = 0.0
    included = 0
    for n in range(1, n_h + 1):
        exponent = (eigen.box_collision_rate(n, H, scales) * tau
                    if forced_unit_absorption else xi * n ** 2)
        if exponent > TRUNCATION_EXPONENT:
            break
        total += math.exp(-exponent)
        included = n
    if forced_unit_absorption:
        regime = "forced"
    elif xi > 1.0:
        regime = "strong"
    elif xi * (config.incoming.k0_per_um * H) ** 2 < 1.0:
        regime = "no-absorption"
    else:
        regime = "weak"
    n_pass = 1.0 / math.sqrt(xi) if xi > 0.0 else math.inf
    return ZeroGravityFlux(H_um=H, F=total, xi_abs=xi, n_pass=n_pass,
                           regime=regime, included=included)


def zero_gravity_flux_curve(H_values_um, config_template: WaveguideConfig,
                            forced_unit_absorption: bool = False,
                            scales: PhysicalScales | None = None
                            ) -> FluxCurve:
    """Zero-gravity flux curve with per-point regime tags."""
    H_values = np.asarray(H_values_um, dtype=float)
    pts = [flux_zero_gravity(config_template.at_height(float(H)),
                             forced_unit_absorption, scales)
           for H in H_values]
    F = np.array([p.F for p in pts])
    # Box sums can run to thousands of terms; bookkeeping stores the
    # aggregate diagonal in a single column (there is no interference).
    return FluxCurve(
        H_um=H_values,
        F=F,
        mode_terms=F[:, None].copy(),
        interference=np.zeros(len(pts)),
        regimes=tuple(p.regime for p in pts),
        mode_counts=tuple(p.included for p in pts),
    )


def critical_height(a: ScatteringLength, tau_pass_s: float,
                    scales: PhysicalScales | None = None) -> float:
    """Height separating strong from weak absorption in the gravity-free
    slit: ``H_c = (2 pi^2 tau |Im a| hbar/m)^(1/3)``, i.e. the height at
    which the absorption constant equals 1."""
    if scales is None:
        scales = neutron_scales()
    if a.im_a_um <= 0.0:
        return 0.0
    return (4.0 * math.pi ** 2 * tau_pass_s * a.im_a_um
            * scales.kinetic_coefficient_peV_um2
            / scales.hbar_peV_s) ** (1.0 / 3.0)


# ---------------------------------------------------------------------------
# inverse geometry
# ---------------------------------------------------------------------------

def flux_ratio_inverse(config: WaveguideConfig,
                       scales: PhysicalScales | None = None) -> float:
    """Inverse-to-direct flux ratio ``exp(-2 m g |Im a| tau / hbar)``.

    In the inverted guide every low state acquires the same universal
    width ``2 m g |Im a|``, while well-bound direct states keep negligible
    width, so the ratio collapses to a single exponential.
    """
    if scales is None:
        scales = neutron_scales()
    if config.absorber is None:
        return 1.0
    gamma = inverse_width_limit(config.absorber, scales).gamma_peV
    return math.exp(-gamma * config.tau_pass_s / scales.hbar_peV_s)


def inverse_flux_curve(H_values_um, config_template: WaveguideConfig,
                       count: int = 4,
                       scales: PhysicalScales | None = None) -> FluxCurve:
    """Diagonal flux curve for the inverted guide.

    Every mode with turning point well below the mirror decays at the
    universal rate, so the curve is essentially flat in height and damped
    by the passage time.  Runs one descending continuation sweep with the
    same negligible-mode drop policy as :func:`averaged_flux_curve`.
    """
    if scales is None:
        scales = neutron_scales()
    if config_template.absorber is None:
        raise ValueError("inverted guide requires an absorbing boundary")
    H_values = np.sort(np.asarray(H_values_um, dtype=float))[::-1].copy()
    if H_values.size == 0:
        raise ValueError("empty height range")
    if np.any(H_values <= 0.0):
        raise ValueError("heights must be positive")
    tau = config_template.tau_pass_s
    qa_c = complex(config_template.absorber.a_um) / scales.l0_um
    qa = qa_c.real if qa_c.imag == 0.0 else qa_c
    seeds = [x + qa for x in ai_negative_zeros(count)]
    families = _swept_modes(eigen._inverse_system, seeds, qa, "inverse",
                            H_values, tau, scales)
    pts = []
    for H, modes in zip(H_values, families):
        kept = _truncate_modes(modes, tau, scales)
        diag = np.array([
            math.exp(-m.gamma_peV * tau / scales.hbar_peV_s) for m in kept
        ])
        pts.append(AveragedFluxPoint(H_um=float(H), F=float(diag.sum()),
                                     mode_terms=diag, interference=0.0,
                                     included=len(kept)))
    order = np.argsort(H_values)
    return _pack_curve(H_values[order], [pts[i] for i in order])
