"""Independent reference implementations used to cross-check the library.

Everything here is deliberately written from first principles (power
series, recurrences, finite differences, high-precision arithmetic) so
that agreement with the library is evidence, not tautology.  Each oracle
is itself validated in ``test_oracles.py`` against basic identities
before any library test relies on it.
"""
from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy import integrate

# ---------------------------------------------------------------------------
# Airy functions from their Maclaurin series
# ---------------------------------------------------------------------------

_AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)     # Ai(0)
_AIP0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)  # Ai'(0)
_BI0 = 3.0 ** (-1.0 / 6.0) / math.gamma(2.0 / 3.0)      # Bi(0)
_BIP0 = 3.0 ** (1.0 / 6.0) / math.gamma(1.0 / 3.0)      # Bi'(0)


def airy_series(z: complex, terms: int = 60):
    """``(Ai, Ai', Bi, Bi')`` from the defining power series.

    The two entire solutions of ``y'' = z y`` are
    ``f(z) = sum c_k z^{3k}`` and ``g(z) = sum d_k z^{3k+1}`` with
    ``c_k = c_{k-1} / ((3k)(3k-1))`` and ``d_k = d_{k-1} / ((3k)(3k+1))``;
    Ai and Bi are the standard linear combinations.  Accurate to ~1e-12
    relative for ``|z| <= 6`` in double precision.
    """
    z = complex(z)
    f = fp = g = gp = 0.0 + 0.0j
    c = 1.0 + 0.0j
    d = 1.0 + 0.0j
    z3 = z ** 3
    for k in range(terms):
        if k == 0:
            f += c
            g += d * z
            gp += d
        else:
            c = c / ((3 * k) * (3 * k - 1))
            d = d / ((3 * k) * (3 * k + 1))
            zk = z3 ** k
            f += c * zk
            fp += c * (3 * k) * zk / z if z != 0 else 0.0
            g += d * zk * z
            gp += d * (3 * k + 1) * zk
    ai = _AI0 * f + _AIP0 * g
    aip = _AI0 * fp + _AIP0 * gp
    bi = math.sqrt(3.0) * (_AI0 * f - _AIP0 * g)
    bip = math.sqrt(3.0) * (_AI0 * fp - _AIP0 * gp)
    return ai, aip, bi, bip


def airy_mp(z: complex, dps: int = 40):
    """``(Ai, Ai', Bi, Bi')`` at ``dps`` decimal digits via mpmath."""
    with mp.workdps(dps):
        zz = mp.mpc(z)
        return (complex(mp.airyai(zz)), complex(mp.airyai(zz, 1)),
                complex(mp.airybi(zz)), complex(mp.airybi(zz, 1)))


def ai_zero_mp(n: int, dps: int = 30) -> float:
    """n-th zero of ``Ai(-x)`` (positive, increasing) at high precision."""
    with mp.workdps(dps):
        return float(-mp.airyaizero(n))


# ---------------------------------------------------------------------------
# high-precision eigenvalue residual for the absorbing-lid problem
# ---------------------------------------------------------------------------

def direct_residual_mp(lam, h: float, q, dps: int = 40):
    """Secular determinant of mirror + mixed lid at ``dps`` digits.

    ``y(0) = 0`` and ``y(h) = q y'(h)`` applied to
    ``y = Bi(-lam) Ai(xi - lam) - Ai(-lam) Bi(xi - lam)`` give
    ``Ai(-lam) (Bi(w) - q Bi'(w)) - Bi(-lam) (Ai(w) - q Ai'(w)) = 0``
    with ``w = h - lam``.
    """
    with mp.workdps(dps):
        lam_m = mp.mpc(lam)
        q_m = mp.mpc(q)
        w = mp.mpf(h) - lam_m
        return (mp.airyai(-lam_m) * (mp.airybi(w) - q_m * mp.airybi(w, 1))
                - mp.airybi(-lam_m) * (mp.airyai(w) - q_m * mp.airyai(w, 1)))


def direct_root_mp(lam0, h: float, q, dps: int = 40) -> complex:
    """Polish a direct-problem eigenvalue at ``dps`` digits."""
    with mp.workdps(dps):
        root = mp.findroot(lambda t: direct_residual_mp(t, h, q, dps),
                           mp.mpc(lam0))
        return complex(root)


def inverse_residual_mp(lam, h: float, qa, dps: int = 40):
    """Secular determinant of the inverted guide at ``dps`` digits.

    Mixed absorbing floor ``y(0) = -q_a y'(0)`` (the scattering-length
    condition ``psi ~ z - a`` near the floor) and hard lid ``y(h) = 0``
    applied to the same Airy pair.
    """
    with mp.workdps(dps):
        lam_m = mp.mpc(lam)
        qa_m = mp.mpc(qa)
        w = mp.mpf(h) - lam_m
        bottom_ai = mp.airyai(-lam_m) + qa_m * mp.airyai(-lam_m, 1)
        bottom_bi = mp.airybi(-lam_m) + qa_m * mp.airybi(-lam_m, 1)
        return bottom_ai * mp.airybi(w) - bottom_bi * mp.airyai(w)


def inverse_root_mp(lam0, h: float, qa, dps: int = 40) -> complex:
    """Polish an inverted-guide eigenvalue at ``dps`` digits."""
    with mp.workdps(dps):
        root = mp.findroot(lambda t: inverse_residual_mp(t, h, qa, dps),
                           mp.mpc(lam0))
        return complex(root)


def two_wall_root_mp(lam0: float, h: float, dps: int = 30) -> float:
    """Polish a two-hard-wall eigenvalue at high precision."""
    with mp.workdps(dps):
        f = lambda t: (mp.airyai(-t) * mp.airybi(mp.mpf(h) - t)
                       - mp.airybi(-t) * mp.airyai(mp.mpf(h) - t))
        return float(mp.findroot(f, mp.mpf(lam0)))


# ---------------------------------------------------------------------------
# numerical differentiation and quadrature
# ---------------------------------------------------------------------------

def richardson_derivative(f, x: float, step: float = 0.02):
    """Five-point Richardson-extrapolated first derivative.

    Combines central differences at ``step`` and ``step/2``; error
    ``O(step^4)``.  Works for real or complex-valued ``f``.
    """
    d1 = (f(x + step) - f(x - step)) / (2.0 * step)
    d2 = (f(x + step / 2) - f(x - step / 2)) / step
    return (4.0 * d2 - d1) / 3.0


def complex_quad(f, a: float, b: float, **kwargs):
    """Adaptive quadrature of a complex-valued integrand on ``[a, b]``."""
    re, _ = integrate.quad(lambda t: f(t).real, a, b, **kwargs)
    im, _ = integrate.quad(lambda t: f(t).imag, a, b, **kwargs)
    return complex(re, im)


# ---------------------------------------------------------------------------
# classical mechanics of the bouncer
# ---------------------------------------------------------------------------

def bounce_period_s(H_um: float, g_ms2: float) -> float:
    """Period of a classical ball bouncing to height ``H`` under gravity."""
    return 2.0 * math.sqrt(2.0 * (H_um * 1e-6) / g_ms2)


# ---------------------------------------------------------------------------
# digamma from recurrence + Stirling tail
# ---------------------------------------------------------------------------

def digamma_oracle(z: complex) -> complex:
    """``psi(z)`` by pushing ``Re z`` above 12 and applying Stirling."""
    z = complex(z)
    shift = 0.0 + 0.0j
    while z.real < 12.0:
        shift -= 1.0 / z
        z += 1.0
    # Stirling: psi(z) ~ ln z - 1/(2z) - sum B_2k / (2k z^{2k})
    inv2 = 1.0 / (z * z)
    tail = (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0
            - inv2 * (1.0 / 240.0 - inv2 / 132.0)))) * inv2
    return np.log(z) - 0.5 / z - tail + shift


# ---------------------------------------------------------------------------
# WKB quantization
# ---------------------------------------------------------------------------

def wkb_eigenvalue(n: int) -> float:
    """Semiclassical eigenvalue ``((3 pi / 4)(2n - 1/2))^{2/3}``."""
    return ((3.0 * math.pi / 4.0) * (2.0 * n - 0.5)) ** (2.0 / 3.0)


# ---------------------------------------------------------------------------
# two-level Schrodinger integration for the driven (rough lid) problem
# ---------------------------------------------------------------------------

def rabi_two_level(delta_per_s: float, coupling_per_s: float,
                   t_s: float) -> float:
    """Excited-state population of a detuned two-level system.

    Analytic Rabi formula: ``(Omega^2 / W^2) sin^2(W t / 2)`` with
    ``W = sqrt(delta^2 + Omega^2)``.
    """
    W = math.hypot(delta_per_s, coupling_per_s)
    if W == 0.0:
        return 0.0
    return (coupling_per_s / W) ** 2 * math.sin(0.5 * W * t_s) ** 2
