"""Parameter sweeps (force curve, friction vs kappa, friction vs detuning)
and log-log power-law fitting.

Grid points are independent and may be farmed out to a process pool; rows
always come back in grid order (family-major for multi-curve sweeps), so
the output is identical for any worker count.
"""

from __future__ import annotations

from dataclasses import dataclass
from multiprocessing import Pool

import numpy as np

from .config import SimConfig, sweep_grid
from .forces import DerivativeMismatch, _friction_value, free_space_friction_max, total_force
from .model import HBAR
from .quadrature import QuadratureFailure
from .steady_state import excitation

__all__ = ["SweepRow", "FitResult", "NonPositiveValue", "run_sweep", "power_law_fit"]


class NonPositiveValue(ValueError):
    """A fit row has value <= 0; the sweep left the cooling regime."""


@dataclass(frozen=True)
class SweepRow:
    """One sweep point.

    x          : swept parameter (v in m/s, kappa in 1/s, or Delta in rad/s)
    secondary  : the held co-parameter (kappa for force/delta rows,
                 Delta for kappa rows)
    value      : force in N or friction in kg/s
    normalized : value / (F_fs or beta_fs_max), recomputed from this
                 row's own configuration
    quad_error : propagated absolute quadrature error estimate
    """

    x: float
    secondary: float
    value: float
    normalized: float
    quad_error: float


@dataclass(frozen=True)
class FitResult:
    """Least-squares power law fit in log-log space."""

    exponent: float
    log_prefactor: float
    r_squared: float


def _force_curve_point(task):
    config, v_units = task
    sys = config.build_system()
    v = v_units * sys.model.kappa / sys.pump.k_p
    try:
        res = total_force(v, sys)
    except QuadratureFailure as exc:
        raise QuadratureFailure(f"force curve point v={v_units:g} kappa/k_p: {exc}") from exc
    s0 = excitation(0.0, +1, sys, include_shift=sys.include_shift)
    f_fs = 2.0 * HBAR * s0 * sys.pump.k_p * sys.atom.gamma
    return SweepRow(x=v, secondary=sys.model.kappa, value=res.total,
                    normalized=res.total / f_fs, quad_error=res.quad_error)


def _beta_point(task):
    config, kappa, delta_abs, x, secondary, spot_check = task
    sys = config.build_system(kappa=kappa, delta_thresh=delta_abs)
    try:
        beta, err = _friction_value(sys, "analytic")
        if spot_check:
            beta_fd, _ = _friction_value(sys, "finite_difference")
            scale = max(abs(beta), abs(beta_fd))
            if scale > 0.0 and abs(beta - beta_fd) > 1e-3 * scale:
                raise DerivativeMismatch(
                    f"analytic beta={beta:.6e} vs finite difference {beta_fd:.6e} "
                    f"at grid point x={x:g}"
                )
    except QuadratureFailure as exc:
        raise QuadratureFailure(f"friction at grid point x={x:g}: {exc}") from exc
    s0 = excitation(0.0, +1, sys, include_shift=sys.include_shift)
    norm = free_space_friction_max(s0, sys.pump.k_p)
    return SweepRow(x=x, secondary=secondary, value=beta, normalized=beta / norm,
                    quad_error=err)


def _tasks(kind: str, config: SimConfig, grid):
    if kind == "force_curve":
        return _force_curve_point, [(config, v) for v in grid]
    tasks = []
    if kind == "kappa":
        for fam in config.sweep.family:
            for i, kap in enumerate(grid):
                delta = fam * kap if config.sweep.delta_mode == "ratio" else fam
                tasks.append((config, kap, delta, kap, delta, i % 10 == 0))
    elif kind == "delta":
        for fam in config.sweep.family:
            for i, d_units in enumerate(grid):
                delta = d_units * fam
                tasks.append((config, fam, delta, delta, fam, i % 10 == 0))
    else:
        raise ValueError(f"unknown sweep kind {kind!r}")
    return _beta_point, tasks


def run_sweep(kind: str, config: SimConfig, grid=None, processes: int = 1):
    """Evaluate one sweep and return its rows in grid order.

    kind is "force_curve", "kappa" or "delta"; grid defaults to the
    config's sweep grid (in the units documented in the config module).
    Friction rows use the analytic derivative with a finite-difference
    spot check on every 10th grid point.
    """
    if grid is None:
        grid = sweep_grid(config.sweep)
    grid = list(grid)
    if not grid:
        raise ValueError("sweep grid must be nonempty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("sweep grid must be strictly increasing")
    if kind == "kappa" and grid[0] <= 0.0:
        raise ValueError("kappa grid values must be positive")

    worker, tasks = _tasks(kind, config, grid)
    if processes and processes > 1 and len(tasks) > 1:
        with Pool(processes=processes) as pool:
            rows = pool.map(worker, tasks, chunksize=1)
    else:
        rows = [worker(t) for t in tasks]
    return rows


def power_law_fit(rows) -> FitResult:
    """Ordinary least squares of ln(value) on ln(x).

    rows is a sequence of (x, value) pairs with x > 0; a value <= 0 raises
    NonPositiveValue (the logarithm is undefined, which in a kappa sweep
    means the cooling regime was left).
    """
    pts = [(float(x), float(y)) for x, y in rows]
    if len(pts) < 3:
        raise ValueError("need at least 3 rows for a power-law fit")
    for x, y in pts:
        if y <= 0.0:
            raise NonPositiveValue(f"value {y:g} at x={x:g} is not positive")
        if x <= 0.0:
            raise ValueError(f"x {x:g} must be positive")
    lx = np.log([x for x, _ in pts])
    ly = np.log([y for _, y in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_res = float(np.sum(resid * resid))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FitResult(exponent=float(slope), log_prefactor=float(intercept),
                     r_squared=r2)
