"""Stationary internal state of the moving atom.

The atom's internal dynamics follow the translational motion
adiabatically; the velocity enters the stationary solution through the
two-photon Doppler shift (k - k_p) v in every mode denominator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import AtomParams, PumpParams, WaveguideModel, coupling_sq, detuning
from .quadrature import NumericsConfig, integrate_branch

__all__ = ["ComplexShift", "SystemState", "waveguide_shift", "excitation"]


@dataclass(frozen=True)
class ComplexShift:
    """Waveguide-induced light shift Delta_A and broadening Gamma_A, rad/s.

    Gamma_A is an integral of a positive quantity and is never negative.
    """

    delta_shift: float
    gamma_broad: float


@dataclass(frozen=True)
class SystemState:
    """Everything needed to evaluate forces: geometry, atom, drive, numerics."""

    model: WaveguideModel
    atom: AtomParams
    pump: PumpParams
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    include_shift: bool = False


def _lorentzian_parts(branch, atom, pump, kps, v, kappa):
    """Integrands g^2*kappa/(X^2+kappa^2) and -g^2*X/(X^2+kappa^2).

    X = delta_n(k) - (k - kps) v is the Doppler-shifted mode detuning.
    """

    def gamma_part(k):
        x = detuning(branch, k, pump) - (k - kps) * v
        return coupling_sq(branch, k, atom) * kappa / (x * x + kappa * kappa)

    def delta_part(k):
        x = detuning(branch, k, pump) - (k - kps) * v
        return -coupling_sq(branch, k, atom) * x / (x * x + kappa * kappa)

    return gamma_part, delta_part


def waveguide_shift(v: float, pump_sign: int, sys: SystemState) -> ComplexShift:
    """Evaluate i*Delta_A + Gamma_A = sum_n int dk g^2/(i X + kappa).

    The real part Gamma_A = sum int g^2 kappa/(X^2+kappa^2) broadens the
    atomic line; the imaginary part Delta_A = -sum int g^2 X/(X^2+kappa^2)
    shifts it.  pump_sign selects the signed pump wavenumber in the
    Doppler term.
    """
    kappa = sys.model.kappa
    kps = pump_sign * sys.pump.k_p
    gamma_broad = 0.0
    delta_shift = 0.0
    for branch in sys.model.branches:
        g_int, d_int = _lorentzian_parts(branch, sys.atom, sys.pump, kps, v, kappa)
        gv, _ = integrate_branch(g_int, branch, v, kps, sys, sys.numerics)
        dv, _ = integrate_branch(d_int, branch, v, kps, sys, sys.numerics)
        gamma_broad += gv
        delta_shift += dv
    return ComplexShift(delta_shift=delta_shift, gamma_broad=gamma_broad)


def excitation(v: float, pump_sign: int, sys: SystemState, include_shift: bool = False) -> float:
    """Mean excitation probability of the atom under one pump.

    <sigma^dag sigma> = Omega_eff^2 / ((delta_A + k_p v + Delta_A)^2
                                       + (gamma + Gamma_A)^2),

    with the signed pump wavenumber in the Doppler term.  By default the
    waveguide shift and broadening are dropped: the atomic detuning
    delta_A dominates the denominator in the far-detuned regime this
    model targets.  The result must stay well below 1 for the linear
    (unsaturated) treatment to hold; that is the caller's responsibility.
    """
    atom = sys.atom
    if include_shift:
        shift = waveguide_shift(v, pump_sign, sys)
        d_a, g_a = shift.delta_shift, shift.gamma_broad
    else:
        d_a = g_a = 0.0
    det = atom.delta_A + (pump_sign * sys.pump.k_p) * v + d_a
    wid = atom.gamma + g_a
    om = sys.pump.Omega_eff
    return om * om / (det * det + wid * wid)
