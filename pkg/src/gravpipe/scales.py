"""Physical constants and unit conversions for the neutron-above-a-mirror
problem.

Internal computations are dimensionless; physical units (micrometre,
pico-electronvolt, second) appear only at API boundaries.  The natural
scales of a particle of mass ``m`` bouncing in a uniform field ``g`` are

    eps0 = (m g^2 hbar^2 / 2) ** (1/3)     (energy scale)
    l0   = (hbar^2 / (2 m^2 g)) ** (1/3)   (length scale)

For the neutron defaults this package *anchors* the conventional rounded
values ``eps0 = 0.602 peV`` and ``l0 = 5.871 um`` exactly and derives the
consistent pair ``(m, g)`` from them, so that the defining identities --
in particular ``m * g * l0 = eps0`` -- hold to machine precision.  The
derived constants land within 0.2% of standard neutron values:

    m = hbar^2 / (2 eps0 l0^2) = 1.672597e-27 kg
    g = eps0 / (m l0)          = 9.82208  m/s^2

Unit conversion constants (6 significant figures, defined once here):

    hbar = 1.05457e-34 J s = 6.58212e-4 peV s
    1 peV = 1.60218e-31 J
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "PhysicalScales",
    "neutron_scales",
    "to_physical",
    "HBAR_JS",
    "HBAR_PEV_S",
    "PEV_TO_J",
]

#: Reduced Planck constant, J s.
HBAR_JS = 1.054571817e-34
#: Reduced Planck constant, peV s.
HBAR_PEV_S = 6.582119569e-4
#: One pico-electronvolt in joule.
PEV_TO_J = 1.602176634e-31


@dataclass(frozen=True)
class PhysicalScales:
    """Mass, field strength and the derived energy/length scales.

    Attributes
    ----------
    mass_kg : float
        Particle mass in kilogram.
    g_ms2 : float
        Uniform acceleration in metre/second^2.
    eps0_peV : float
        Energy scale in pico-electronvolt.
    l0_um : float
        Length scale in micrometre.
    """

    mass_kg: float
    g_ms2: float
    eps0_peV: float
    l0_um: float

    # -- frequently used derived combinations --------------------------------

    @property
    def hbar_peV_s(self) -> float:
        """Reduced Planck constant in peV s (unit-system constant)."""
        return HBAR_PEV_S

    @property
    def kinetic_coefficient_peV_um2(self) -> float:
        """``hbar^2/(2m)`` expressed as ``eps0 * l0**2`` (peV um^2)."""
        return self.eps0_peV * self.l0_um ** 2

    @property
    def mg_peV_per_um(self) -> float:
        """Weight ``m*g`` expressed as ``eps0 / l0`` (peV/um)."""
        return self.eps0_peV / self.l0_um

    def energy_from_wavenumber(self, k_per_um: complex) -> complex:
        """Kinetic energy ``hbar^2 k^2/(2m)`` in peV for ``k`` in 1/um."""
        return self.kinetic_coefficient_peV_um2 * k_per_um ** 2

    def wavenumber_from_energy(self, energy_peV: float) -> float:
        """Wavenumber in 1/um for a kinetic energy in peV."""
        if energy_peV < 0.0:
            raise ValueError("energy must be non-negative")
        return (energy_peV / self.kinetic_coefficient_peV_um2) ** 0.5

    def rate_from_width(self, gamma_peV: float) -> float:
        """Decay rate ``Gamma/hbar`` in 1/s for a width in peV."""
        return gamma_peV / HBAR_PEV_S

    def lifetime_from_width(self, gamma_peV: float) -> float:
        """Lifetime ``hbar/Gamma`` in seconds for a width in peV."""
        if gamma_peV == 0.0:
            return float("inf")
        return HBAR_PEV_S / gamma_peV


def neutron_scales() -> PhysicalScales:
    """Return the neutron default scales.

    Anchors ``eps0 = 0.602 peV`` and ``l0 = 5.871 um`` exactly and derives
    the consistent ``(m, g)``; see the module docstring.
    """
    eps0_peV = 0.602
    l0_um = 5.871
    eps0_J = eps0_peV * PEV_TO_J
    l0_m = l0_um * 1e-6
    mass_kg = HBAR_JS ** 2 / (2.0 * eps0_J * l0_m ** 2)
    g_ms2 = eps0_J / (mass_kg * l0_m)
    return PhysicalScales(
        mass_kg=mass_kg, g_ms2=g_ms2, eps0_peV=eps0_peV, l0_um=l0_um
    )


def to_physical(lam: complex, scales: PhysicalScales) -> tuple[complex, float]:
    """Convert a dimensionless eigenvalue to physical energy and height.

    Parameters
    ----------
    lam : complex
        Dimensionless eigenvalue (real or complex).
    scales : PhysicalScales

    Returns
    -------
    (E, H) : (complex, float)
        Energy ``eps0 * lam`` in peV (complex if ``lam`` is complex) and
        classical turning height ``l0 * Re(lam)`` in um.
    """
    lam_c = complex(lam)
    energy = scales.eps0_peV * (lam_c if lam_c.imag != 0.0 else lam_c.real)
    height = scales.l0_um * lam_c.real
    return energy, height
