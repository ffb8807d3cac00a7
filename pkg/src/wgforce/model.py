"""Physical model: waveguide geometry, dispersion, atom and pump parameters.

The waveguide is a generic quasi-1D guide, open along z and confined
transversely.  Each transverse mode family ("branch") carries the
massive-photon dispersion

    omega_n(k) = sqrt(omega_th_n**2 + (c*k)**2),

where omega_th_n is the branch threshold (band edge).  For a rectangular
guide with conducting walls the thresholds are omega_th_n = n*pi*c/a for
width a, and the transverse profiles are sinusoidal.

The particle is an unsaturated two-level atom far detuned from the pump,
so it acts as a simple polarizable scatterer.  SI units throughout:
angular frequencies in rad/s, wavenumbers in rad/m, lengths in m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Universal constants (fixed, never configurable).
C_LIGHT = 2.99792458e8     # speed of light, m/s
HBAR = 1.054571817e-34     # reduced Planck constant, J*s

__all__ = [
    "C_LIGHT",
    "HBAR",
    "AtomParams",
    "Branch",
    "WaveguideModel",
    "PumpParams",
    "NonPropagatingPump",
    "branch_frequency",
    "group_velocity",
    "transverse_amplitude",
    "coupling_sq",
    "detuning",
    "pump_wavenumber",
]


class NonPropagatingPump(ValueError):
    """Pump frequency at or below the fundamental band edge."""


@dataclass(frozen=True)
class AtomParams:
    """Two-level-atom surrogate for a polarizable particle.

    gamma    : half width of the atomic line, rad/s (full width is 2*gamma)
    delta_A  : atom-pump detuning omega_A - omega_p, rad/s
    mass     : particle mass, kg
    x_frac   : transverse position as a fraction of the waveguide width
    omega_A  : atomic resonance frequency, rad/s (= omega_p + delta_A)
    z_A      : longitudinal position, m; cancels in every mean value
    """

    gamma: float
    delta_A: float
    mass: float
    x_frac: float
    omega_A: float
    z_A: float = 0.0

    @property
    def lambda_A(self) -> float:
        """Atomic transition wavelength, m."""
        return 2.0 * math.pi * C_LIGHT / self.omega_A

    @property
    def sigma_A(self) -> float:
        """Radiative cross section 3*lambda_A^2/(2*pi), m^2.

        Recomputed on access so it can never go stale.
        """
        lam = self.lambda_A
        return 3.0 * lam * lam / (2.0 * math.pi)


@dataclass(frozen=True)
class Branch:
    """One transverse mode family of the waveguide.

    n        : branch index (1 = fundamental)
    omega_th : threshold angular frequency (k = 0 band edge), rad/s
    u_A      : transverse mode amplitude at the atom's position
               (normalized so the cross-section average of u^2 is 1)
    A_eff    : effective mode cross section, m^2; u_A = 0 gives
               A_eff = inf, i.e. a decoupled branch
    """

    n: int
    omega_th: float
    u_A: float
    A_eff: float


@dataclass(frozen=True)
class WaveguideModel:
    """Waveguide geometry plus loss.

    width_a  : transverse width, m
    kappa    : photon loss rate, 1/s, shared by all modes (kappa/c is the
               loss per unit length); kappa > 0 is required because it
               regularizes the force singularity at the band edge
    branches : branches ordered by increasing threshold
    """

    width_a: float
    kappa: float
    branches: tuple[Branch, ...]


@dataclass(frozen=True)
class PumpParams:
    """Drive of one (or two, for two_sided) fundamental-branch modes.

    omega_p   : pump angular frequency, rad/s
    k_p       : pump wavenumber on the fundamental branch, rad/m
                (positive root of omega_1(k) = omega_p)
    Omega_eff : effective pumped-mode Rabi amplitude g_{kp,1}*eta/kappa,
                rad/s; packages the pump amplitude and the continuum
                normalization into a single drive parameter
    two_sided : drive both +k_p and -k_p with equal intensity and
                independent phases
    """

    omega_p: float
    k_p: float
    Omega_eff: float
    two_sided: bool = True


def branch_frequency(branch: Branch, k):
    """Mode frequency omega_n(k) = sqrt(omega_th^2 + (c k)^2), rad/s.

    Even in k; accepts scalars or arrays.
    """
    ck = C_LIGHT * np.asarray(k, dtype=float)
    out = np.sqrt(branch.omega_th * branch.omega_th + ck * ck)
    return out if out.ndim else float(out)


def group_velocity(branch: Branch, k):
    """d omega_n/dk = c^2 k / omega_n(k), m/s.  Odd in k, |v_g| < c."""
    om = branch_frequency(branch, k)
    out = C_LIGHT * C_LIGHT * np.asarray(k, dtype=float) / om
    return out if out.ndim else float(out)


def transverse_amplitude(n: int, x_frac):
    """Transverse profile u_n(x) = sqrt(2) sin(n pi x), x in units of the width.

    The sqrt(2) makes the cross-section average of u^2 equal to 1; the
    amplitude vanishes at the conducting walls x = 0, 1.
    """
    out = math.sqrt(2.0) * np.sin(n * math.pi * np.asarray(x_frac, dtype=float))
    return out if out.ndim else float(out)


def coupling_sq(branch: Branch, k, atom: AtomParams):
    """Squared atom-mode coupling g_kn^2, m/s^2.

    g_kn^2 = (sigma_A / A_eff) * (omega_A / omega_n(k)) * (gamma c / 4 pi).
    The only k dependence is the 1/omega_n(k) factor.
    """
    om = branch_frequency(branch, k)
    pref = (atom.sigma_A / branch.A_eff) * atom.omega_A * atom.gamma * C_LIGHT / (4.0 * math.pi)
    return pref / om


def detuning(branch: Branch, k, pump: PumpParams):
    """Mode-pump detuning delta_n(k) = omega_n(k) - omega_p, rad/s."""
    return branch_frequency(branch, k) - pump.omega_p


def pump_wavenumber(model: WaveguideModel, omega_p: float) -> float:
    """Positive wavenumber of the pumped fundamental mode, rad/m.

    Inverts the fundamental dispersion: k_p = sqrt(omega_p^2 - omega_th1^2)/c.

    Raises NonPropagatingPump when omega_p does not exceed the fundamental
    threshold.
    """
    om_th = model.branches[0].omega_th
    if omega_p <= om_th:
        raise NonPropagatingPump(
            f"pump frequency {omega_p:g} rad/s does not propagate: fundamental "
            f"threshold is {om_th:g} rad/s"
        )
    return math.sqrt(omega_p * omega_p - om_th * om_th) / C_LIGHT
