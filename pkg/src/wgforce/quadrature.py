"""Resonance-aware quadrature over the wavenumber axis.

Every integral in this package has the form  integral dk f(k)  where f is
smooth except for Lorentzian peaks at the roots of the two-photon
resonance function

    R(k) = delta_n(k) - (k - k_p) v .

R is strictly convex (the dispersion is convex, minus a linear term), so
there are 0, 1 or 2 roots.  The integrator locates them, seeds panels of
width kappa/|dR/dk| around each, and refines with an adaptive
Gauss-Kronrod 7/15 pair until the summed error estimate meets tolerance.

Peaks at a band edge are wide in k: the quadratic dispersion makes the
peak width scale like sqrt(kappa*omega_th)/c rather than kappa/c, and
there dR/dk ~ -v can be tiny.  Seed widths therefore use the local
|dR/dk| with a floor, and the adaptive refinement resolves whatever the
seeds miss.

Tail truncation: at large |k| the coupling decays like g^2 ~ 1/omega ~
1/(c|k|) and R ~ c|k|, so the force-type integrand |k| g^2 kappa / R^2
falls off like 1/k^2 and its tail beyond k_max is bounded by
|f(k_max)|*k_max (shift-type integrands decay faster, which makes the
same bound conservative).  k_max starts at tail_factor*k_p and doubles
until the bound drops below the tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import C_LIGHT, Branch, PumpParams, branch_frequency, group_velocity

__all__ = [
    "NumericsConfig",
    "QuadratureFailure",
    "find_resonances",
    "integrate_branch",
    "oracle_trapezoid",
]


class QuadratureFailure(RuntimeError):
    """The integrator could not meet tolerance within its evaluation budget."""


@dataclass(frozen=True)
class NumericsConfig:
    """Tolerances and budgets for the integrals.

    rel_tol      : relative tolerance per integral
    abs_tol      : absolute floor, in integrand units
    max_evals    : integrand-evaluation budget per integral
    tail_factor  : k_max starts at tail_factor * k_p
    fd_step_frac : finite-difference velocity step, as a fraction of kappa/k_p
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-30
    max_evals: int = 10_000_000
    tail_factor: float = 1e3
    fd_step_frac: float = 1e-3


# Gauss-Kronrod 7/15 pair on [-1, 1].  Positive abscissae only; each row
# below pairs with its mirror image.  Standard QUADPACK values.
_XGK = np.array([
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
])
_WGK = np.array([
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
])
_WGK_CENTER = 0.209482141084728
# The Gauss-7 nodes are the odd-indexed Kronrod abscissae.
_G7_COLS = np.array([1, 3, 5])
_WG7 = np.array([
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
])
_WG7_CENTER = 0.417959183673469


def _eval_panels(f, a, b):
    """Gauss-Kronrod 7/15 on each panel [a_i, b_i].

    Returns (k15, err) arrays.  Symmetric node pairs are summed before the
    weighted reduction, so an integrand with even or odd mirror symmetry
    produces exactly mirrored panel values.
    """
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    off = h[:, None] * _XGK[None, :]
    nodes = np.concatenate([c[:, None], c[:, None] + off, c[:, None] - off], axis=1)
    vals = f(nodes)
    fc = vals[:, 0]
    pairs = vals[:, 1:8] + vals[:, 8:15]
    k15 = h * (_WGK_CENTER * fc + np.sum(pairs * _WGK[None, :], axis=1))
    g7 = h * (_WG7_CENTER * fc + np.sum(pairs[:, _G7_COLS] * _WG7[None, :], axis=1))
    err = np.abs(k15 - g7)
    return k15, err


def _resonance_function(branch, v, k_p_signed, pump):
    om_p = pump.omega_p

    def R(k):
        return branch_frequency(branch, k) - om_p - (k - k_p_signed) * v

    return R


def _resonance_slope(branch, v, k):
    return group_velocity(branch, k) - v


def _bisect_root(R, lo, hi):
    """Bisection to machine resolution; R(lo) and R(hi) straddle zero.

    Midpoints are computed as 0.5*(lo+hi), so a sign-mirrored problem
    walks the exactly mirrored iterates.
    """
    flo = R(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            return mid
        fm = R(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_resonances(branch: Branch, v: float, k_p_signed: float, pump: PumpParams):
    """Roots of R(k) = delta_n(k) - (k - k_p) v, sorted ascending.

    Convexity of R gives 0, 1 or 2 roots.  The minimum of R sits where the
    group velocity equals v, which has the closed form
    k* = v*omega_th/(c*sqrt(c^2 - v^2)); each side is then bisected down
    to machine resolution.
    """
    if abs(v) >= C_LIGHT:
        raise ValueError("atom velocity must satisfy |v| < c")
    R = _resonance_function(branch, v, k_p_signed, pump)
    om_th = branch.omega_th
    k_star = v * om_th / (C_LIGHT * math.sqrt(C_LIGHT * C_LIGHT - v * v))
    r_min = R(k_star)
    if r_min > 0.0:
        return []
    if r_min == 0.0:
        return [k_star]

    # Expand geometrically from the minimum until R turns positive.  The
    # initial step comes from the local curvature c^2*omega_th^2/omega^3.
    om_star = branch_frequency(branch, k_star)
    curv = (C_LIGHT * C_LIGHT) * om_th * om_th / (om_star * om_star * om_star)
    step = math.sqrt(2.0 * (-r_min) / curv)
    roots = []
    for sign in (-1.0, 1.0):
        d = step
        for _ in range(300):
            edge = k_star + sign * d
            if R(edge) > 0.0:
                break
            d *= 2.0
        else:
            raise QuadratureFailure("resonance bracketing did not terminate")
        lo, hi = (edge, k_star) if sign < 0 else (k_star, edge)
        roots.append(_bisect_root(R, lo, hi))
    roots.sort()
    return roots


def _panel_edges(branch, v, k_p_signed, pump, kappa, k_max, width_scale):
    """Seeded panel edges over [-k_max, k_max].

    Seeds sit at the resonance roots and at the minimum of R.  Around each
    seed, edges at offsets +-w*{1,3,10,30,100} resolve the peak and its
    shoulders, with w = kappa/max(|dR/dk|, kappa*c/omega_p).  Geometric
    ladders (ratio 4) fill the gap out to the tails.
    """
    roots = find_resonances(branch, v, k_p_signed, pump)
    k_star = v * branch.omega_th / (C_LIGHT * math.sqrt(C_LIGHT * C_LIGHT - v * v))
    seeds = list(roots) + [k_star]

    slope_floor = kappa * C_LIGHT / pump.omega_p
    edges = set()
    for s in seeds:
        if not -k_max < s < k_max:
            continue
        mu = max(abs(_resonance_slope(branch, v, s)), slope_floor)
        w = (kappa / mu) * width_scale
        edges.add(s)
        for m in (1.0, 3.0, 10.0, 30.0, 100.0):
            for e in (s - m * w, s + m * w):
                if -k_max < e < k_max:
                    edges.add(e)

    hi = max((e for e in edges if e > 0.0), default=kappa / C_LIGHT)
    lo = min((e for e in edges if e < 0.0), default=-kappa / C_LIGHT)
    # Ladders are built on |k| and mirrored by negation so that a
    # sign-mirrored problem gets bitwise-mirrored edges.
    x = max(hi, kappa / C_LIGHT)
    while x < k_max:
        edges.add(x)
        x *= 4.0
    x = max(-lo, kappa / C_LIGHT)
    while x < k_max:
        edges.add(-x)
        x *= 4.0
    edges.add(-k_max)
    edges.add(k_max)
    return np.array(sorted(edges))


def _tail_setup(f, branch, v, k_p_signed, sys, cfg, width_scale):
    """Pick k_max by the tail bound and return it with the seeded panels.

    k_max doubles from tail_factor*k_p until |f(+-k_max)|*k_max (the
    1/k^2-decay tail integrated to infinity) drops below
    abs_tol + rel_tol*|coarse estimate|.
    """
    kappa = sys.model.kappa
    pump = sys.pump
    k_max = cfg.tail_factor * abs(k_p_signed)
    for _ in range(200):
        edges = _panel_edges(branch, v, k_p_signed, pump, kappa, k_max, width_scale)
        a = edges[:-1]
        b = edges[1:]
        vals, errs = _eval_panels(f, a, b)
        coarse = abs(math.fsum(vals))
        fk = f(np.array([k_max, -k_max]))
        tail = (abs(float(fk[0])) + abs(float(fk[1]))) * k_max
        if tail <= cfg.abs_tol + cfg.rel_tol * coarse:
            return k_max, a, b, vals, errs
        k_max *= 2.0
    raise QuadratureFailure("tail bound not satisfied after 200 doublings")


def tail_k_max(f, branch: Branch, v: float, k_p_signed: float, sys,
               cfg: NumericsConfig) -> float:
    """The truncation wavenumber integrate_branch would use for f."""
    k_max, _, _, _, _ = _tail_setup(f, branch, v, k_p_signed, sys, cfg, 1.0)
    return k_max


def integrate_branch(f, branch: Branch, v: float, k_p_signed: float, sys, cfg: NumericsConfig,
                     width_scale: float = 1.0):
    """Adaptively integrate f over k for one branch.

    f must accept numpy arrays of k and be smooth apart from Lorentzian
    peaks at the roots of R(k).  Returns (value, error_estimate).

    Raises QuadratureFailure if cfg.max_evals integrand evaluations do not
    reach tolerance.
    """
    _, a, b, vals, errs = _tail_setup(f, branch, v, k_p_signed, sys, cfg, width_scale)
    nev = 15 * len(a)
    prev_err = math.inf
    stall = 0

    while True:
        total = math.fsum(vals)
        err_total = math.fsum(errs)
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if err_total <= tol:
            return total, err_total
        # Integrals that cancel internally (odd integrands around a
        # resonance) can leave |total| orders of magnitude below the L1
        # mass; their relative tolerance then sits below the roundoff
        # floor.  When refinement stops improving the estimate, accept
        # the converged value with its honest error estimate.
        if err_total >= 0.995 * prev_err:
            stall += 1
            if stall >= 6:
                return total, err_total
        else:
            stall = 0
        prev_err = err_total

        # Split the worst panels in one batch (everything within a factor
        # 4 of the largest error estimate).
        cutoff = 0.25 * float(errs.max())
        width_ok = (b - a) > np.abs(a + b) * 1e-15
        mask = (errs >= cutoff) & width_ok
        if not mask.any():
            return total, err_total
        sa, sb = a[mask], b[mask]
        mid = 0.5 * (sa + sb)
        na = np.concatenate([a[~mask], sa, mid])
        nb = np.concatenate([b[~mask], mid, sb])
        nev += 15 * (2 * len(sa))
        if nev > cfg.max_evals:
            raise QuadratureFailure(
                f"evaluation budget {cfg.max_evals} exhausted at error "
                f"{err_total:.3e} (tolerance {tol:.3e})"
            )
        nvals, nerrs = _eval_panels(f, np.concatenate([sa, mid]), np.concatenate([mid, sb]))
        vals = np.concatenate([vals[~mask], nvals])
        errs = np.concatenate([errs[~mask], nerrs])
        a, b = na, nb


def oracle_trapezoid(f, n_nodes: int, k_max: float):
    """Composite trapezoid on a uniform grid over [-k_max, k_max].

    Deliberately simple, no adaptivity; used only as an independent check
    of integrate_branch in tests.  Nodes are built as signed integer
    multiples of the step, so the grid is exactly symmetric, and mirrored
    node pairs are summed together, which makes the result exactly
    invariant under grid reversal.
    """
    n = int(n_nodes)
    if n < 2:
        raise ValueError("need at least two nodes")
    half = (n - 1) / 2.0
    step = k_max / half

    chunk = 1 << 20
    parts = []
    n_pairs = n // 2
    for start in range(0, n_pairs, chunk):
        idx = np.arange(start, min(start + chunk, n_pairs), dtype=float)
        k_neg = (idx - half) * step
        pair = f(k_neg) + f(-k_neg)
        if start == 0:
            pair[0] *= 0.5  # trapezoid endpoints carry half weight
        parts.append(float(np.sum(pair)))
    total = math.fsum(parts)
    if n % 2 == 1:
        total += float(f(np.zeros(1))[0])
    return step * total
