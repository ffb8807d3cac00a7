"""Mean radiation force, friction coefficient and capture range.

The force from one pump at signed wavenumber k_p is

    <F> = 2 hbar <sigma^dag sigma> ( k_p gamma
          + kappa sum_n int dk (k_p - k) g_kn^2 / (X^2 + kappa^2) ),

with X = delta_n(k) - (k - k_p) v.  The first term is the free-space
radiation pressure; the integral is the scattering into guided modes,
resonantly enhanced wherever the two-photon Doppler shift tunes a branch
into resonance.  Two-sided pumping adds the two pump forces incoherently
(independent phases, no interference terms).
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import HBAR, coupling_sq, detuning
from .quadrature import QuadratureFailure, integrate_branch
from .steady_state import SystemState, excitation, waveguide_shift

__all__ = [
    "ForceResult",
    "FrictionResult",
    "DerivativeMismatch",
    "NoSignChange",
    "single_pump_force",
    "total_force",
    "friction_coefficient",
    "free_space_friction_max",
    "capture_range",
]


class DerivativeMismatch(RuntimeError):
    """Analytic and finite-difference friction disagree beyond tolerance.

    Signals an integration-tolerance problem rather than physics.
    """


class NoSignChange(RuntimeError):
    """The total force does not change sign within the bracketing cap."""


@dataclass(frozen=True)
class ForceResult:
    """Mean force in N with its decomposition.

    total = free_space_term + sum of per_branch contributions, to within
    quad_error (the summed absolute quadrature error estimate).
    """

    total: float
    free_space_term: float
    per_branch: tuple[tuple[int, float], ...]
    quad_error: float


@dataclass(frozen=True)
class FrictionResult:
    """Friction coefficient beta = -dF/dv at v = 0.

    beta            : kg/s; positive means cooling
    beta_normalized : beta / (4 hbar k_p^2 s0), the maximum free-space
                      Doppler friction at the same rest excitation s0
    method          : "analytic" or "finite_difference"
    s0              : rest excitation used for the normalization
    """

    beta: float
    beta_normalized: float
    method: str
    s0: float


def _force_integrand(branch, atom, pump, kps, v, kappa):
    def f(k):
        x = detuning(branch, k, pump) - (k - kps) * v
        return (kps - k) * coupling_sq(branch, k, atom) / (x * x + kappa * kappa)

    return f


def single_pump_force(v: float, pump_sign: int, sys: SystemState) -> ForceResult:
    """Mean force from the pump at pump_sign * k_p on an atom moving at v."""
    kappa = sys.model.kappa
    kps = pump_sign * sys.pump.k_p
    s = excitation(v, pump_sign, sys, include_shift=sys.include_shift)
    pref = 2.0 * HBAR * s
    free_space = pref * kps * sys.atom.gamma

    total = free_space
    per_branch = []
    quad_error = 0.0
    for branch in sys.model.branches:
        f = _force_integrand(branch, sys.atom, sys.pump, kps, v, kappa)
        try:
            val, err = integrate_branch(f, branch, v, kps, sys, sys.numerics)
        except QuadratureFailure as exc:
            raise QuadratureFailure(
                f"force integral failed on branch {branch.n} at v={v:g}, "
                f"pump_sign={pump_sign:+d}: {exc}"
            ) from exc
        contrib = pref * kappa * val
        per_branch.append((branch.n, contrib))
        total += contrib
        quad_error += pref * kappa * err
    return ForceResult(total=total, free_space_term=free_space,
                       per_branch=tuple(per_branch), quad_error=quad_error)


def total_force(v: float, sys: SystemState) -> ForceResult:
    """Force summed over both pumps (or the +k_p pump alone if one-sided).

    Each pump is evaluated independently with its own excitation; the
    contributions add incoherently.
    """
    plus = single_pump_force(v, +1, sys)
    if not sys.pump.two_sided:
        return plus
    minus = single_pump_force(v, -1, sys)
    merged = {}
    for n, c in plus.per_branch + minus.per_branch:
        merged[n] = merged.get(n, 0.0) + c
    return ForceResult(
        total=plus.total + minus.total,
        free_space_term=plus.free_space_term + minus.free_space_term,
        per_branch=tuple(sorted(merged.items())),
        quad_error=plus.quad_error + minus.quad_error,
    )


def _excitation_slope_at_rest(sys: SystemState):
    """(s0, ds/dv at v=0) for the +k_p pump, differentiated analytically."""
    atom = sys.atom
    k_p = sys.pump.k_p
    om = sys.pump.Omega_eff
    if sys.include_shift:
        shift = waveguide_shift(0.0, +1, sys)
        d_a, g_a = shift.delta_shift, shift.gamma_broad
        d_a_p, g_a_p = _shift_slope_at_rest(sys)
    else:
        d_a = g_a = d_a_p = g_a_p = 0.0
    det = atom.delta_A + d_a
    wid = atom.gamma + g_a
    denom = det * det + wid * wid
    s0 = om * om / denom
    d_denom = 2.0 * det * (k_p + d_a_p) + 2.0 * wid * g_a_p
    return s0, -s0 * d_denom / denom


def _shift_slope_at_rest(sys: SystemState):
    """d(Delta_A)/dv and d(Gamma_A)/dv at v = 0 for the +k_p pump.

    Differentiating under the integral sign with dX/dv = (k_p - k):

        dGamma/dv = -2 kappa int g^2 X (k_p - k) / (X^2+kappa^2)^2
        dDelta/dv = -    int g^2 (k_p - k)(kappa^2 - X^2) / (X^2+kappa^2)^2
    """
    kappa = sys.model.kappa
    kps = sys.pump.k_p
    d_slope = 0.0
    g_slope = 0.0
    for branch in sys.model.branches:
        atom, pump = sys.atom, sys.pump

        def g_int(k):
            x = detuning(branch, k, pump)
            den = x * x + kappa * kappa
            return -2.0 * kappa * coupling_sq(branch, k, atom) * x * (kps - k) / (den * den)

        def d_int(k):
            x = detuning(branch, k, pump)
            den = x * x + kappa * kappa
            return (-coupling_sq(branch, k, atom) * (kps - k)
                    * (kappa * kappa - x * x) / (den * den))

        gv, _ = integrate_branch(g_int, branch, 0.0, kps, sys, sys.numerics)
        dv, _ = integrate_branch(d_int, branch, 0.0, kps, sys, sys.numerics)
        g_slope += gv
        d_slope += dv
    return d_slope, g_slope


def friction_coefficient(sys: SystemState, method: str = "analytic",
                         cross_check: bool = False) -> FrictionResult:
    """Friction coefficient beta = -d(total force)/dv at v = 0.

    method "finite_difference" uses a central difference with step
    fd_step_frac * kappa/k_p.  method "analytic" differentiates under the
    integral sign; by mirror symmetry of two-sided pumping both pumps
    contribute equally at v = 0, so beta = -2 dF_+/dv|_0 with

        dF_+/dv = 2 hbar ( s'(0) W(0) + s(0) W'(0) ),
        W'(0)   = -2 kappa sum_n int dk (k_p-k)^2 g^2 delta_n
                  / (delta_n^2 + kappa^2)^2 ,

    where W is the bracketed term of the force and s'(0) includes the
    excitation's own Doppler derivative (negligible at large delta_A but
    kept).  With cross_check=True the other method is evaluated too and a
    relative disagreement beyond 1e-3 raises DerivativeMismatch.

    Requires two-sided pumping.
    """
    if not sys.pump.two_sided:
        raise ValueError("friction is defined for two-sided pumping")
    if method not in ("analytic", "finite_difference"):
        raise ValueError(f"unknown method {method!r}")

    beta, _ = _friction_value(sys, method)
    if cross_check:
        other = "finite_difference" if method == "analytic" else "analytic"
        beta_other, _ = _friction_value(sys, other)
        scale = max(abs(beta), abs(beta_other))
        if scale > 0.0 and abs(beta - beta_other) > 1e-3 * scale:
            raise DerivativeMismatch(
                f"{method} beta={beta:.6e} vs {other} beta={beta_other:.6e}"
            )
    s0 = excitation(0.0, +1, sys, include_shift=sys.include_shift)
    norm = free_space_friction_max(s0, sys.pump.k_p)
    return FrictionResult(beta=beta, beta_normalized=beta / norm, method=method, s0=s0)


def _friction_value(sys: SystemState, method: str) -> tuple[float, float]:
    """(beta, propagated quadrature error estimate), both kg/s."""
    if method == "finite_difference":
        h = sys.numerics.fd_step_frac * sys.model.kappa / sys.pump.k_p
        f_plus = total_force(h, sys)
        f_minus = total_force(-h, sys)
        beta = -(f_plus.total - f_minus.total) / (2.0 * h)
        return beta, (f_plus.quad_error + f_minus.quad_error) / (2.0 * h)

    kappa = sys.model.kappa
    k_p = sys.pump.k_p
    s0, ds = _excitation_slope_at_rest(sys)
    rest = single_pump_force(0.0, +1, sys)
    w0 = rest.total / (2.0 * HBAR * s0)
    w0_err = rest.quad_error / (2.0 * HBAR * s0)

    w_slope = 0.0
    w_slope_err = 0.0
    for branch in sys.model.branches:
        atom, pump = sys.atom, sys.pump

        def d_int(k):
            x = detuning(branch, k, pump)
            den = x * x + kappa * kappa
            d = k_p - k
            return coupling_sq(branch, k, atom) * d * d * x / (den * den)

        val, err = integrate_branch(d_int, branch, 0.0, k_p, sys, sys.numerics)
        w_slope += -2.0 * kappa * val
        w_slope_err += 2.0 * kappa * err
    df_dv = 2.0 * HBAR * (ds * w0 + s0 * w_slope)
    err = 2.0 * 2.0 * HBAR * (abs(ds) * w0_err + s0 * w_slope_err)
    return -2.0 * df_dv, err


def free_space_friction_max(s0: float, k_p: float) -> float:
    """Maximum two-beam free-space Doppler friction at rest excitation s0.

    The free-space friction 8 hbar gamma k_p^2 delta s0/(delta^2+gamma^2)
    peaks at delta = gamma, where it equals 4 hbar k_p^2 s0.
    """
    return 4.0 * HBAR * k_p * k_p * s0


def capture_range(sys: SystemState) -> float:
    """Smallest v > 0 at which the total force changes sign, m/s.

    Brackets geometrically from 1e-3 kappa/k_p in factor-1.5 steps up to
    1e3 kappa/k_p, then bisects to 1e-6 relative.  Raises NoSignChange if
    no bracket is found below the cap.  Meaningful only when a cooling
    regime exists (friction_coefficient > 0).
    """
    unit = sys.model.kappa / sys.pump.k_p
    v_lo = 1e-3 * unit
    cap = 1e3 * unit
    f_lo = total_force(v_lo, sys).total
    v_hi = v_lo
    while True:
        v_hi = v_hi * 1.5
        if v_hi > cap:
            raise NoSignChange(
                f"total force keeps the sign of F({v_lo:g} m/s) up to {cap:g} m/s"
            )
        f_hi = total_force(v_hi, sys).total
        if f_hi == 0.0:
            return v_hi
        if (f_hi < 0.0) != (f_lo < 0.0):
            break
        v_lo, f_lo = v_hi, f_hi
    while v_hi - v_lo > 1e-6 * v_hi:
        mid = 0.5 * (v_lo + v_hi)
        f_mid = total_force(mid, sys).total
        if f_mid == 0.0:
            return mid
        if (f_mid < 0.0) == (f_lo < 0.0):
            v_lo, f_lo = mid, f_mid
        else:
            v_hi = mid
    return 0.5 * (v_lo + v_hi)
