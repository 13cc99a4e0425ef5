"""Resolution limits of absorber spectroscopy and step-model fitting.

Two questions about the staircase transmission curve are answered here.

*How sharp can a step be?*  A state stops transmitting once its
absorption time inside the absorber falls below the passage time; because
the tunnelling suppression is exponential in the 3/2 power of the height
margin, the observed step for state n is shifted up by ``shift_um`` and
smeared over ``smear_um``, both slowly varying (powers of2/3 and -1/3 of
a logarithm of the time ratio).  Two neighbouring steps are considered
resolved when the gap between their shifted positions exceeds the smear
by the module-wide margin factor (3, stated in every report); the number
of resolvable states then grows only logarithmically with the time
ratio, which is the practical ceiling of the method.

*What do we learn from a measured curve?*  :func:`fit_step_model`
performs weighted Levenberg-Marquardt fitting of the semiclassical
staircase (per-state threshold eigenvalues and populations) with an
analytic Jacobian, log-amplitude parameterization, and eigenvalues
seeded at the ideal-mirror values.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .absorber import ScatteringLength, ValidityWarning
from .airy import ai_negative_zeros
from .scales import PhysicalScales, neutron_scales

__all__ = [
    "MARGIN_FACTOR",
    "ResolutionReport",
    "FitResult",
    "resolution",
    "resolvable_count_bound",
    "tau_abs_flat",
    "tau_abs_rough",
    "fit_step_model",
    "synthetic_step_data",
    "DEFAULT_FIT_SEED",
]

#: Concrete reading of "much smaller than" everywhere in this module:
#: a quantity is negligible against another when it is at least 3x smaller.
MARGIN_FACTOR = 3.0

#: Fixed RNG seed for the synthetic-data round-trip workflows.
DEFAULT_FIT_SEED = 20020117

_C23 = (3.0 / 4.0) ** (2.0 / 3.0)


# ---------------------------------------------------------------------------
# absorption-time helpers
# ---------------------------------------------------------------------------

def tau_abs_flat(n: int, a: ScatteringLength,
                 scales: PhysicalScales | None = None) -> float:
    """Absorption time of state ``n`` fully exposed to a flat absorber (s).

    Inverse of the saturated absorption rate
    ``2 (|Im a|/l0) eps0 sqrt(l0/H_n)`` (the perturbative width with the
    tunnelling factor at saturation).
    """
    if scales is None:
        scales = neutron_scales()
    if a.im_a_um <= 0.0:
        raise ValueError("absorber must have a negative imaginary length")
    lam = float(ai_negative_zeros(n)[-1])
    return (scales.hbar_peV_s * scales.l0_um * math.sqrt(lam)
            / (2.0 * a.im_a_um * scales.eps0_peV))


def tau_abs_rough(n: int, b_um: float, a: ScatteringLength,
                  scales: PhysicalScales | None = None) -> float:
    """Absorption time of state ``n`` against a rough absorber (s).

    The flat-absorber time with ``|Im a|`` replaced by the roughness
    effective length ``b^2 / (16 |Im a|)``; note it *grows* with
    ``|Im a|``, the over-absorption suppression.
    """
    if scales is None:
        scales = neutron_scales()
    if b_um <= 0.0:
        raise ValueError("roughness amplitude must be positive")
    eff = b_um ** 2 / (16.0 * a.im_a_um)
    lam = float(ai_negative_zeros(n)[-1])
    return (scales.hbar_peV_s * scales.l0_um * math.sqrt(lam)
            / (2.0 * eff * scales.eps0_peV))


# ---------------------------------------------------------------------------
# resolution report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResolutionReport:
    """Per-state step shift, smear and resolvability verdicts.

    ``shift_um[i]`` / ``smear_um[i]`` describe the observed threshold of
    state ``n[i]``; entries are NaN with ``ill_conditioned`` set when the
    time ratio is below e^2 and the underlying double logarithm loses
    meaning.  ``resolvable[i]`` applies the margin rule against the next
    state's shifted position.  The "much less than" margin used
    throughout is ``margin_factor``.
    """

    tau_pass_s: float
    n: np.ndarray
    H_um: np.ndarray
    ratio: np.ndarray
    shift_um: np.ndarray
    smear_um: np.ndarray
    resolvable: np.ndarray
    ill_conditioned: np.ndarray
    margin_factor: float = MARGIN_FACTOR

    @property
    def count(self) -> int:
        """Number of leading states that are resolvable (prefix length)."""
        total = 0
        for flag in self.resolvable:
            if not flag:
                break
            total += 1
        return total


def _shift_smear(ratio: float, H_um: float,
                 scales: PhysicalScales) -> tuple[float, float]:
    """Shift and smear of one step from its passage/absorption time ratio.

    The shift solves (iterated once) the threshold condition "tunnelling
    lifetime equals passage time": ``shift = l0 (3/4)^{2/3} L^{2/3}`` with
    the refined logarithm ``L = ln(ratio sqrt(shift0/H))`` built from the
    zeroth iterate ``shift0 = l0 (3/4)^{2/3} (ln ratio)^{2/3}``.  The
    smear is the derivative-controlled window ``(2 l0/3) (3/4)^{2/3}
    L^{-1/3}``.  Returns NaNs when the refined logarithm is not positive.
    """
    l0 = scales.l0_um
    log0 = math.log(ratio)
    if log0 <= 0.0:
        return math.nan, math.nan
    shift0 = l0 * _C23 * log0 ** (2.0 / 3.0)
    refined = math.log(ratio * math.sqrt(shift0 / H_um))
    if refined <= 0.0:
        return math.nan, math.nan
    shift = l0 * _C23 * refined ** (2.0 / 3.0)
    smear = (2.0 * l0 / 3.0) * _C23 * refined ** (-1.0 / 3.0)
    return shift, smear


def resolution(tau_pass_s: float, tau_abs_s, count: int = 7,
               scales: PhysicalScales | None = None) -> ResolutionReport:
    """Step shift, smear and resolvability for states ``1..count``.

    ``tau_abs_s`` is the per-state absorption time (scalar, or one value
    per state; see :func:`tau_abs_flat` / :func:`tau_abs_rough`).  States
    whose ratio ``tau_pass/tau_abs`` is at or below e^2 get NaN entries
    and the ``ill_conditioned`` flag instead of an extrapolated number.
    A warning is issued when any ratio has ``ln`` below the margin
    factor, where the leading-log estimates degrade.
    """
    if scales is None:
        scales = neutron_scales()
    if count < 1:
        raise ValueError("count must be at least 1")
    if tau_pass_s <= 0.0:
        raise ValueError("passage time must be positive")
    tau_abs = np.broadcast_to(
        np.asarray(tau_abs_s, dtype=float), (count,)
    ).copy()
    if np.any(tau_abs <= 0.0):
        raise ValueError("absorption times must be positive")
    ratio = tau_pass_s / tau_abs
    if np.any(np.log(ratio) < MARGIN_FACTOR):
        warnings.warn(
            "time ratio not deep in the logarithmic regime; shift/smear "
            "estimates are leading-log only",
            ValidityWarning, stacklevel=2,
        )
    # one extra state so the last gap (to state count+1) is available;
    # its ratio reuses the final provided value
    lam = ai_negative_zeros(count + 1)
    H = lam * scales.l0_um
    ratio_ext = np.append(ratio, ratio[-1])
    shift = np.empty(count + 1)
    smear = np.empty(count + 1)
    for i in range(count + 1):
        shift[i], smear[i] = _shift_smear(float(ratio_ext[i]), float(H[i]),
                                          scales)
    position = H + shift
    gap = np.diff(position)
    resolvable = np.zeros(count, dtype=bool)
    ill = np.zeros(count, dtype=bool)
    for i in range(count):
        if ratio_ext[i] <= math.e ** 2 or not math.isfinite(shift[i]):
            ill[i] = True
            shift[i] = math.nan
            smear[i] = math.nan
            continue
        if math.isfinite(gap[i]):
            resolvable[i] = MARGIN_FACTOR * smear[i] <= gap[i]
    return ResolutionReport(
        tau_pass_s=float(tau_pass_s),
        n=np.arange(1, count + 1),
        H_um=H[:count],
        ratio=ratio,
        shift_um=shift[:count],
        smear_um=smear[:count],
        resolvable=resolvable,
        ill_conditioned=ill,
    )


def resolvable_count_bound(tau_pass_s: float, tau_abs_s: float,
                           scales: PhysicalScales | None = None) -> int:
    """Largest number of leading states resolvable at this time ratio.

    Applies the margin rule ``margin * smear_n <= next gap`` with a
    uniform ratio for every state; grows like the logarithm of the ratio.
    Requires ``tau_pass/tau_abs > e`` (below that the estimates are
    meaningless and at most one step could ever be seen).
    """
    if scales is None:
        scales = neutron_scales()
    ratio = tau_pass_s / tau_abs_s
    if ratio <= math.e:
        raise ValueError("time ratio must exceed e for a resolvability "
                         "estimate")
    count = 0
    block = 8
    while True:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            report = resolution(tau_pass_s, tau_abs_s, count + block, scales)
        prefix = report.count
        if prefix < count + block or count + block > 512:
            return prefix
        count += block


# ---------------------------------------------------------------------------
# step-model fitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FitResult:
    """Weighted least-squares estimate of the staircase parameters.

    ``lambdas`` / ``amplitudes`` are the fitted threshold eigenvalues and
    populations; ``lambda_sigma`` / ``amplitude_sigma`` their one-sigma
    estimates from the local quadratic model; ``pulls`` the per-point
    weighted residuals at the optimum.  ``ordered`` records whether the
    fitted eigenvalues came out strictly increasing (they should).
    ``converged`` is False when the optimizer hit its evaluation budget,
    in which case the best point so far is reported.
    """

    lambdas: np.ndarray
    amplitudes: np.ndarray
    lambda_sigma: np.ndarray
    amplitude_sigma: np.ndarray
    covariance: np.ndarray
    residual_norm: float
    pulls: np.ndarray
    converged: bool
    ordered: bool
    n_evaluations: int
    message: str
    tau_pass_s: float
    seeds: np.ndarray = field(repr=False, default=None)


def _model_terms(lam: np.ndarray, H_um: np.ndarray, tau_pass_s: float,
                 scales: PhysicalScales) -> tuple[np.ndarray, np.ndarray]:
    """Per-state transmission factors and eigenvalue derivatives.

    Returns ``g`` and ``dg/dlam``, each of shape ``(len(H), len(lam))``,
    for the staircase term ``g = exp(-r)`` with
    ``r = tau_pass * omega(lam) * exp(-(4/3) sign(x)|x|^{3/2})``,
    ``x = H/l0 - lam`` and collision rate
    ``omega = (eps0/hbar) / (2 sqrt(lam))`` — the same quantity as the
    scalar staircase flux, vectorized for the optimizer, with
    ``dr/dlam = r (2 sqrt|x| - 1/(2 lam))`` exact (the signed 3/2 power
    is C^1 through x = 0).
    """
    h = H_um[:, None] / scales.l0_um
    lam = lam[None, :]
    x = h - lam
    omega = scales.eps0_peV / scales.hbar_peV_s / (2.0 * np.sqrt(lam))
    exponent = (4.0 / 3.0) * np.sign(x) * np.abs(x) ** 1.5
    r = tau_pass_s * omega * np.exp(-np.clip(exponent, -700.0, 700.0))
    g = np.exp(-np.minimum(r, 745.0))
    dg = -g * r * (2.0 * np.sqrt(np.abs(x)) - 0.5 / lam)
    return g, dg


def fit_step_model(data, n_states: int, tau_pass_s: float,
                   lambda_seeds=None,
                   scales: PhysicalScales | None = None) -> FitResult:
    """Fit the staircase model to measured flux points.

    ``data`` is ``(H_um, counts, sigma)`` as three sequences or an
    ``(N, 3)`` array with positive errors and at least ``3 * n_states``
    points.  The optimizer is Levenberg-Marquardt with the analytic
    Jacobian, parameterized in eigenvalue offsets from the ideal-mirror
    seeds and log amplitudes (which keeps amplitudes positive without
    explicit bounds); convergence is declared at relative step 1e-9 and
    the evaluation budget is 500.
    """
    if scales is None:
        scales = neutron_scales()
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 3 and arr.shape[0] != 3:
        H, y, sig = arr.T
    else:
        H, y, sig = (np.asarray(c, dtype=float) for c in data)
    if not (H.shape == y.shape == sig.shape) or H.ndim != 1:
        raise ValueError("data must provide matching H, counts, sigma arrays")
    if H.size < 3 * n_states:
        raise ValueError(
            f"need at least {3 * n_states} points to fit {n_states} states"
        )
    if np.any(sig <= 0.0):
        raise ValueError("errors must be positive")
    if n_states < 1:
        raise ValueError("n_states must be at least 1")

    seeds = (ai_negative_zeros(n_states) if lambda_seeds is None
             else np.asarray(lambda_seeds, dtype=float))
    if seeds.shape != (n_states,):
        raise ValueError("one eigenvalue seed per state required")

    # tiny floor keeps log-amplitudes finite if the optimizer zeroes one
    amp_floor = 1e-300

    def unpack(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lam = seeds + p[:n_states]
        amp = np.exp(np.minimum(p[n_states:], 700.0))
        return lam, amp

    def residuals(p: np.ndarray) -> np.ndarray:
        lam, amp = unpack(p)
        g, _ = _model_terms(lam, H, tau_pass_s, scales)
        return (g @ amp - y) / sig

    def jacobian(p: np.ndarray) -> np.ndarray:
        lam, amp = unpack(p)
        g, dg = _model_terms(lam, H, tau_pass_s, scales)
        J = np.empty((H.size, 2 * n_states))
        J[:, :n_states] = dg * amp[None, :]
        J[:, n_states:] = g * amp[None, :]  # d/d(log A) = A * g
        return J / sig[:, None]

    p0 = np.zeros(2 * n_states)
    sol = least_squares(residuals, p0, jac=jacobian, method="lm",
                        xtol=1e-9, ftol=1e-12, gtol=1e-12, max_nfev=500)
    lam, amp = unpack(sol.x)
    amp = np.maximum(amp, amp_floor)
    pulls = sol.fun
    dof = max(H.size - 2 * n_states, 1)
    scale2 = float(pulls @ pulls) / dof
    JtJ = sol.jac.T @ sol.jac
    cov_p = np.linalg.pinv(JtJ) * scale2
    # delta-method transform from (offset, log A) to (lambda, A)
    chain = np.concatenate([np.ones(n_states), amp])
    covariance = cov_p * np.outer(chain, chain)
    sigmas = np.sqrt(np.maximum(np.diag(covariance), 0.0))
    return FitResult(
        lambdas=lam,
        amplitudes=amp,
        lambda_sigma=sigmas[:n_states],
        amplitude_sigma=sigmas[n_states:],
        covariance=covariance,
        residual_norm=float(np.linalg.norm(pulls)),
        pulls=pulls,
        converged=bool(sol.status > 0),
        ordered=bool(np.all(np.diff(lam) > 0.0)),
        n_evaluations=int(sol.nfev),
        message=str(sol.message),
        tau_pass_s=float(tau_pass_s),
        seeds=seeds,
    )


def synthetic_step_data(lambdas, amplitudes, tau_pass_s: float,
                        H_um=None, noise_fraction: float = 0.0,
                        seed: int = DEFAULT_FIT_SEED,
                        scales: PhysicalScales | None = None
                        ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Deterministic synthetic staircase dataset ``(H, counts, sigma)``.

    Gaussian noise of relative size ``noise_fraction`` (plus a small
    uniform floor that keeps the weights finite where the flux vanishes)
    is drawn from a fixed-seed generator; ``noise_fraction = 0`` returns
    the exact model values.
    """
    if scales is None:
        scales = neutron_scales()
    if H_um is None:
        H_um = np.arange(1.0, 60.0 + 0.25, 0.5)
    H = np.asarray(H_um, dtype=float)
    lam = np.asarray(lambdas, dtype=float)
    amp = np.asarray(amplitudes, dtype=float)
    g, _ = _model_terms(lam, H, tau_pass_s, scales)
    F = g @ amp
    sigma = noise_fraction * F + 1e-3 * float(F.max())
    rng = np.random.default_rng(seed)
    counts = F + sigma * rng.standard_normal(F.shape) \
        if noise_fraction > 0.0 else F.copy()
    return H, counts, sigma
