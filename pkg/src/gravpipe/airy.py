"""Complex Airy functions Ai, Bi, their derivatives, scaled variants, and the
negative real zeros of Ai.

Every transcendental eigenvalue equation in this package is built from the
four values (Ai, Bi, Ai', Bi') at real or complex arguments.  This module
wraps a verified evaluation core and adds:

* ``airy_eval`` -- unscaled values with strict range reporting,
* ``airy_eval_scaled`` -- overflow-free values with the exponential growth
  factor removed and the (real) growth exponent returned separately,
* ``ai_negative_zeros`` -- the zeros of Ai on the negative real axis,
  seeded semiclassically and Newton-polished to machine precision.

Scaling convention
------------------
Let ``zeta = (2/3) * z**1.5`` (principal branch) and ``s = Re(zeta)``.  The
scaled values are

    ai_scaled  = ai  * exp(+s)        bi_scaled  = bi  * exp(-|s|)
    aip_scaled = aip * exp(+s)        bip_scaled = bip * exp(-|s|)

The exponent ``s`` is purely real, so real arguments yield exactly real
scaled values, and reconstruction of the unscaled values is a real
rescaling.  For ``Re(zeta) <= 0`` (the oscillatory sector, e.g. negative
real ``z``) the exponent is ``<= 0`` and no rescaling blow-up can occur.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "AiryPair",
    "ScaledAiryPair",
    "AiryRangeError",
    "airy_eval",
    "airy_eval_scaled",
    "ai_negative_zeros",
    "growth_exponent",
    "wkb_zero_estimate",
]

#: Maximum admissible |z| for any evaluation in this module.
MAX_ABS_ARGUMENT = 1.0e4


class AiryRangeError(ArithmeticError):
    """Unscaled evaluation overflowed double precision.

    Raised by :func:`airy_eval` when Bi (or its derivative) is not
    representable; callers should switch to :func:`airy_eval_scaled`.
    """


@dataclass(frozen=True)
class AiryPair:
    """Unscaled values of the two Airy functions and their derivatives.

    Attributes
    ----------
    ai, bi : complex
        Function values ``Ai(z)``, ``Bi(z)``.
    aip, bip : complex
        First derivatives ``Ai'(z)``, ``Bi'(z)``.
    """

    ai: complex
    bi: complex
    aip: complex
    bip: complex

    def wronskian(self) -> complex:
        """Return ``Ai*Bi' - Ai'*Bi`` (identically ``1/pi``)."""
        return self.ai * self.bip - self.aip * self.bi


@dataclass(frozen=True)
class ScaledAiryPair:
    """Airy values with the exponential growth factor removed.

    Attributes
    ----------
    ai, bi, aip, bip : complex
        Scaled values; see the module docstring for the convention.
    exponent : float
        The real growth exponent ``s = Re((2/3) z**1.5)``.
    """

    ai: complex
    bi: complex
    aip: complex
    bip: complex
    exponent: float

    def unscaled(self) -> AiryPair:
        """Reconstruct unscaled values (may overflow for large exponent)."""
        down = math.exp(-self.exponent) if abs(self.exponent) < 709.0 else float("inf")
        up = math.exp(abs(self.exponent)) if abs(self.exponent) < 709.0 else float("inf")
        if not math.isfinite(up):
            raise AiryRangeError(
                "unscaling overflows double precision at exponent "
                f"{self.exponent:.3g}; keep working with scaled values"
            )
        return AiryPair(
            ai=self.ai * down,
            bi=self.bi * up,
            aip=self.aip * down,
            bip=self.bip * up,
        )


def growth_exponent(z: complex) -> float:
    """Return ``s = Re((2/3) z**1.5)`` (principal branch)."""
    zc = complex(z)
    if zc.imag == 0.0 and zc.real < 0.0:
        return 0.0
    return ((2.0 / 3.0) * zc ** 1.5).real


def _check_argument(z: complex) -> complex:
    zc = complex(z)
    if not (math.isfinite(zc.real) and math.isfinite(zc.imag)):
        raise ValueError("Airy argument must be finite")
    if abs(zc) >= MAX_ABS_ARGUMENT:
        raise ValueError(
            f"|z| = {abs(zc):.3g} outside the supported range |z| < {MAX_ABS_ARGUMENT:g}"
        )
    return zc


def airy_eval(z: complex) -> AiryPair:
    """Evaluate Ai, Bi, Ai', Bi' at a real or complex argument.

    Parameters
    ----------
    z : complex
        Argument with ``|z| < 1e4``.

    Returns
    -------
    AiryPair
        Unscaled values.  Real arguments produce values with exactly zero
        imaginary part.

    Raises
    ------
    ValueError
        If the argument is non-finite or outside the supported disk.
    AiryRangeError
        If an unscaled value overflows double precision (large positive
        real part); use :func:`airy_eval_scaled` instead.
    """
    zc = _check_argument(z)
    if zc.imag == 0.0:
        ai, aip, bi, bip = special.airy(zc.real)
        vals = (complex(ai), complex(bi), complex(aip), complex(bip))
    else:
        ai, aip, bi, bip = special.airy(zc)
        vals = (complex(ai), complex(bi), complex(aip), complex(bip))
    if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in vals):
        raise AiryRangeError(
            f"unscaled Airy values overflow at z = {zc:.6g}; "
            "use airy_eval_scaled"
        )
    return AiryPair(ai=vals[0], bi=vals[1], aip=vals[2], bip=vals[3])


def airy_eval_scaled(z: complex) -> ScaledAiryPair:
    """Evaluate exponentially scaled Airy values (overflow-free).

    See the module docstring for the scaling convention.  Finite for real
    parts up to the module-wide argument bound.

    Parameters
    ----------
    z : complex
        Argument with ``|z| < 1e4``.

    Returns
    -------
    ScaledAiryPair
    """
    zc = _check_argument(z)
    if zc.imag == 0.0:
        x = zc.real
        if x < 0.0:
            # Oscillatory sector: no exponential growth, exponent is zero.
            ai, aip, bi, bip = special.airy(x)
            return ScaledAiryPair(
                ai=complex(ai), bi=complex(bi),
                aip=complex(aip), bip=complex(bip), exponent=0.0,
            )
        ai, aip, bi, bip = special.airye(x)
        return ScaledAiryPair(
            ai=complex(ai), bi=complex(bi),
            aip=complex(aip), bip=complex(bip),
            exponent=(2.0 / 3.0) * x ** 1.5,
        )
    zeta = (2.0 / 3.0) * zc ** 1.5
    s = zeta.real
    # The evaluation core scales the Ai side by exp(+zeta) (a complex
    # factor); rotate back by exp(-i Im zeta) so only the real exponent s
    # is removed, per the module convention.
    ai, aip, bi, bip = special.airye(zc)
    phase = complex(math.cos(zeta.imag), -math.sin(zeta.imag))
    return ScaledAiryPair(
        ai=complex(ai) * phase,
        bi=complex(bi),
        aip=complex(aip) * phase,
        bip=complex(bip),
        exponent=s,
    )


def wkb_zero_estimate(n: int | np.ndarray) -> float | np.ndarray:
    """Semiclassical estimate of the n-th negative zero of Ai (n >= 1).

    ``lambda_n ~ ((3*pi/4) * (2n - 1/2)) ** (2/3)``; accurate to a few
    parts in 1e3 already at n = 1.
    """
    t = (3.0 * math.pi / 4.0) * (2.0 * np.asarray(n, dtype=float) - 0.5)
    out = t ** (2.0 / 3.0)
    if np.isscalar(n) or np.asarray(n).ndim == 0:
        return float(out)
    return out


def ai_negative_zeros(count: int) -> np.ndarray:
    """First ``count`` zeros of ``Ai(-lambda)`` on the positive real axis.

    Semiclassically seeded, Newton-polished with the analytic derivative
    until the step is below 1e-13.

    Parameters
    ----------
    count : int
        Number of zeros, ``1 <= count <= 10000``.

    Returns
    -------
    numpy.ndarray
        Strictly increasing positive values ``lambda_1 < ... < lambda_count``.
    """
    if not isinstance(count, (int, np.integer)) or isinstance(count, bool):
        raise ValueError("count must be a positive integer")
    if count < 1 or count > 10000:
        raise ValueError("count must satisfy 1 <= count <= 10000")
    lam = np.asarray(wkb_zero_estimate(np.arange(1, count + 1)), dtype=float)
    lam = np.atleast_1d(lam)
    for _ in range(50):
        ai, aip, _, _ = special.airy(-lam)
        step = ai / aip  # Newton step for f(lam) = Ai(-lam), f' = -Ai'(-lam)
        lam = lam + step
        if np.max(np.abs(step)) < 1e-13:
            break
    else:  # pragma: no cover - Newton always converges from WKB seeds
        raise RuntimeError("zero refinement did not converge")
    if not np.all(np.diff(lam) > 0.0):  # pragma: no cover - defensive
        raise RuntimeError("computed zeros are not strictly increasing")
    return lam
