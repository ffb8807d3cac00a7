"""Configuration: JSON parsing, validation, defaults and figure presets.

A config is a single JSON document with top-level objects atom, pump,
waveguide, numerics and sweep.  Unknown keys are rejected; missing keys
take the defaults below, and the fully resolved config is echoed into
every output header so results are reproducible from their own files.

Geometry is parametrized by the pump detuning from the excited-branch
threshold, delta_thresh = omega_p - omega_th2 (rad/s, negative = pump
below threshold).  The guide width follows as a = 2 pi c / omega_th2,
which puts the fundamental threshold at omega_th2 / 2.

Sweep grid units depend on the sweep kind:
  force_curve : velocities in units of kappa/k_p
  kappa       : loss rates in 1/s (log_spaced recommended)
  delta       : detunings in units of kappa
For kind="kappa" the family lists the per-curve detunings, read as
Delta/kappa ratios when delta_mode="ratio" (the default, which keeps the
band-edge resonance condition fixed as kappa sweeps) or as absolute rad/s
when delta_mode="absolute".  For kind="delta" the family lists kappa
values in 1/s.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict

from .model import (
    AtomParams,
    Branch,
    C_LIGHT,
    PumpParams,
    WaveguideModel,
    pump_wavenumber,
    transverse_amplitude,
)
from .quadrature import NumericsConfig
from .steady_state import SystemState

__all__ = [
    "ConfigError",
    "AtomConfig",
    "PumpConfig",
    "WaveguideConfig",
    "SweepConfig",
    "SimConfig",
    "parse_config",
    "config_from_dict",
    "preset",
    "sweep_grid",
]

KAPPA_MIN = 1e3  # below this the band-edge peaks become unresolvable


class ConfigError(ValueError):
    """Invalid configuration; the message names the key and constraint."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class AtomConfig:
    gamma: float = 2e7                 # half width of the atomic line, rad/s
    delta_A_over_gamma: float = 1e5    # atom-pump detuning in units of gamma
    mass_kg: float = 1.443e-25         # Rb-87
    x_frac: float = 0.25               # maximum of the first excited mode
    include_shift: bool = False        # keep Delta_A, Gamma_A in the excitation


@dataclass(frozen=True)
class PumpConfig:
    lambda_p_m: float = 780e-9         # pump wavelength (alkali D2 scale)
    omega_eff: float = 2e9             # effective Rabi amplitude, rad/s
    two_sided: bool = True


@dataclass(frozen=True)
class WaveguideConfig:
    kappa: float = 1e9                 # photon loss rate, 1/s
    delta_thresh: float | None = None  # omega_p - omega_th2, rad/s; None -> -3*kappa
    a0_over_lambda_p_sq: float = 1.0   # baseline mode area in units of lambda_p^2
    extra_branches: tuple[int, ...] = ()   # branch indices n >= 3 to include

    @property
    def delta_resolved(self) -> float:
        return -3.0 * self.kappa if self.delta_thresh is None else self.delta_thresh


@dataclass(frozen=True)
class SweepConfig:
    kind: str = "force_curve"
    grid_min: float = -5.0
    grid_max: float = 5.0
    n_points: int = 401
    log_spaced: bool = False
    family: tuple[float, ...] = ()
    delta_mode: str = "ratio"


@dataclass(frozen=True)
class SimConfig:
    atom: AtomConfig = field(default_factory=AtomConfig)
    pump: PumpConfig = field(default_factory=PumpConfig)
    waveguide: WaveguideConfig = field(default_factory=WaveguideConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)

    @property
    def omega_p(self) -> float:
        return 2.0 * math.pi * C_LIGHT / self.pump.lambda_p_m

    def build_system(self, kappa: float | None = None,
                     delta_thresh: float | None = None) -> SystemState:
        """Construct the physical system, optionally overriding kappa or
        the threshold detuning (used by parameter sweeps)."""
        kap = self.waveguide.kappa if kappa is None else kappa
        if kap < KAPPA_MIN:
            raise ConfigError("waveguide.kappa", f"kappa must be >= {KAPPA_MIN:g}")
        delta = self.waveguide.delta_resolved if delta_thresh is None else delta_thresh
        omega_p = self.omega_p
        if not -omega_p < delta < omega_p:
            raise ConfigError("waveguide.delta_thresh",
                              f"must lie strictly between +-omega_p = +-{omega_p:g}")
        om_th2 = omega_p - delta
        width = 2.0 * math.pi * C_LIGHT / om_th2
        om_th1 = 0.5 * om_th2
        lam = self.pump.lambda_p_m
        a0 = self.waveguide.a0_over_lambda_p_sq * lam * lam

        branches = []
        for n in (1, 2) + self.waveguide.extra_branches:
            u = transverse_amplitude(n, self.atom.x_frac)
            a_eff = a0 / (u * u) if u != 0.0 else math.inf
            branches.append(Branch(n=n, omega_th=n * om_th1, u_A=u, A_eff=a_eff))
        model = WaveguideModel(width_a=width, kappa=kap, branches=tuple(branches))

        k_p = pump_wavenumber(model, omega_p)
        delta_a = self.atom.delta_A_over_gamma * self.atom.gamma
        atom = AtomParams(gamma=self.atom.gamma, delta_A=delta_a, mass=self.atom.mass_kg,
                          x_frac=self.atom.x_frac, omega_A=omega_p + delta_a)
        pump = PumpParams(omega_p=omega_p, k_p=k_p, Omega_eff=self.pump.omega_eff,
                          two_sided=self.pump.two_sided)
        return SystemState(model=model, atom=atom, pump=pump, numerics=self.numerics,
                           include_shift=self.atom.include_shift)

    def echo_items(self) -> list[tuple[str, object]]:
        """Fully resolved config as sorted (dotted key, value) pairs."""
        items = []
        raw = {
            "atom": asdict(self.atom),
            "pump": asdict(self.pump),
            "waveguide": asdict(self.waveguide),
            "numerics": asdict(self.numerics),
            "sweep": asdict(self.sweep),
        }
        raw["waveguide"]["delta_thresh"] = self.waveguide.delta_resolved
        for section in sorted(raw):
            for key in sorted(raw[section]):
                items.append((f"{section}.{key}", raw[section][key]))
        return items

    def to_json(self) -> str:
        doc = {
            "atom": asdict(self.atom),
            "pump": asdict(self.pump),
            "waveguide": {**asdict(self.waveguide),
                          "delta_thresh": self.waveguide.delta_resolved,
                          "extra_branches": list(self.waveguide.extra_branches)},
            "numerics": asdict(self.numerics),
            "sweep": {**asdict(self.sweep), "family": list(self.sweep.family)},
        }
        return json.dumps(doc, indent=2)


def _want_number(d, section, key, default, lo=None, hi=None, lo_strict=True,
                 constraint=None):
    path = f"{section}.{key}"
    if key not in d:
        return default
    x = d[key]
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(path, "must be a number")
    x = float(x)
    if not math.isfinite(x):
        raise ConfigError(path, "must be finite")
    if lo is not None and (x <= lo if lo_strict else x < lo):
        raise ConfigError(path, constraint or f"must be {'>' if lo_strict else '>='} {lo:g}")
    if hi is not None and x > hi:
        raise ConfigError(path, constraint or f"must be <= {hi:g}")
    return x


def _want_bool(d, section, key, default):
    if key not in d:
        return default
    x = d[key]
    if not isinstance(x, bool):
        raise ConfigError(f"{section}.{key}", "must be true or false")
    return x


def _check_keys(d, section, allowed):
    for key in d:
        if key not in allowed:
            raise ConfigError(f"{section}.{key}" if section else key, "unknown key")


def config_from_dict(doc: dict) -> SimConfig:
    """Validate a plain dict (parsed JSON) into a SimConfig."""
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    _check_keys(doc, "", ("atom", "pump", "waveguide", "numerics", "sweep"))
    for section in doc:
        if not isinstance(doc[section], dict):
            raise ConfigError(section, "must be an object")

    a = doc.get("atom", {})
    _check_keys(a, "atom", ("gamma", "delta_A_over_gamma", "mass_kg", "x_frac",
                            "include_shift"))
    atom = AtomConfig(
        gamma=_want_number(a, "atom", "gamma", 2e7, lo=0.0),
        delta_A_over_gamma=_want_number(a, "atom", "delta_A_over_gamma", 1e5),
        mass_kg=_want_number(a, "atom", "mass_kg", 1.443e-25, lo=0.0),
        x_frac=_want_number(a, "atom", "x_frac", 0.25, lo=0.0, hi=1.0,
                            constraint="must lie strictly between 0 and 1"),
        include_shift=_want_bool(a, "atom", "include_shift", False),
    )
    if atom.x_frac >= 1.0:
        raise ConfigError("atom.x_frac", "must lie strictly between 0 and 1")

    p = doc.get("pump", {})
    _check_keys(p, "pump", ("lambda_p_m", "omega_eff", "two_sided"))
    pump = PumpConfig(
        lambda_p_m=_want_number(p, "pump", "lambda_p_m", 780e-9, lo=0.0),
        omega_eff=_want_number(p, "pump", "omega_eff", 2e9, lo=0.0, lo_strict=False),
        two_sided=_want_bool(p, "pump", "two_sided", True),
    )

    w = doc.get("waveguide", {})
    _check_keys(w, "waveguide", ("kappa", "delta_thresh", "a0_over_lambda_p_sq",
                                 "extra_branches"))
    kappa = _want_number(w, "waveguide", "kappa", 1e9, lo=KAPPA_MIN, lo_strict=False,
                         constraint=f"kappa must be >= {KAPPA_MIN:g}")
    delta_thresh = None
    if "delta_thresh" in w and w["delta_thresh"] is not None:
        delta_thresh = _want_number(w, "waveguide", "delta_thresh", None)
    extra = w.get("extra_branches", [])
    if not isinstance(extra, list):
        raise ConfigError("waveguide.extra_branches", "must be a list of integers >= 3")
    for x in extra:
        if isinstance(x, bool) or not isinstance(x, int) or x < 3:
            raise ConfigError("waveguide.extra_branches",
                              "must be a list of integers >= 3")
    if len(set(extra)) != len(extra):
        raise ConfigError("waveguide.extra_branches", "indices must be unique")
    waveguide = WaveguideConfig(
        kappa=kappa,
        delta_thresh=delta_thresh,
        a0_over_lambda_p_sq=_want_number(w, "waveguide", "a0_over_lambda_p_sq", 1.0,
                                         lo=0.0),
        extra_branches=tuple(sorted(extra)),
    )

    n = doc.get("numerics", {})
    _check_keys(n, "numerics", ("rel_tol", "abs_tol", "max_evals", "tail_factor",
                                "fd_step_frac"))
    numerics = NumericsConfig(
        rel_tol=_want_number(n, "numerics", "rel_tol", 1e-8, lo=0.0),
        abs_tol=_want_number(n, "numerics", "abs_tol", 1e-30, lo=0.0, lo_strict=False),
        max_evals=int(_want_number(n, "numerics", "max_evals", 1e7, lo=0.0)),
        tail_factor=_want_number(n, "numerics", "tail_factor", 1e3, lo=10.0,
                                 lo_strict=False,
                                 constraint="tail_factor must be >= 10"),
        fd_step_frac=_want_number(n, "numerics", "fd_step_frac", 1e-3, lo=0.0),
    )

    s = doc.get("sweep", {})
    _check_keys(s, "sweep", ("kind", "grid_min", "grid_max", "n_points", "log_spaced",
                             "family", "delta_mode"))
    kind = s.get("kind", "force_curve")
    if kind not in ("force_curve", "kappa", "delta"):
        raise ConfigError("sweep.kind", "must be one of force_curve, kappa, delta")
    delta_mode = s.get("delta_mode", "ratio")
    if delta_mode not in ("ratio", "absolute"):
        raise ConfigError("sweep.delta_mode", "must be 'ratio' or 'absolute'")
    defaults = {
        "force_curve": (-5.0, 5.0, 401, False),
        "kappa": (1e8, 1e10, 9, True),
        "delta": (-20.0, 5.0, 101, False),
    }[kind]
    grid_min = _want_number(s, "sweep", "grid_min", defaults[0])
    grid_max = _want_number(s, "sweep", "grid_max", defaults[1])
    if not grid_min < grid_max:
        raise ConfigError("sweep.grid_min", "must be strictly below sweep.grid_max")
    n_points = _want_number(s, "sweep", "n_points", defaults[2], lo=0.0)
    if n_points != int(n_points):
        raise ConfigError("sweep.n_points", "must be an integer")
    log_spaced = _want_bool(s, "sweep", "log_spaced", defaults[3])
    if log_spaced and grid_min <= 0.0:
        raise ConfigError("sweep.grid_min", "log spacing needs grid_min > 0")
    if kind == "kappa" and grid_min < KAPPA_MIN:
        raise ConfigError("sweep.grid_min", f"kappa grid must stay >= {KAPPA_MIN:g}")
    family = s.get("family", None)
    if family is not None:
        if not isinstance(family, list) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in family
        ):
            raise ConfigError("sweep.family", "must be a list of numbers")
        family = tuple(float(x) for x in family)
    else:
        family = ()
    if not family:
        if kind == "kappa":
            family = (-3.0,) if delta_mode == "ratio" else (waveguide.delta_resolved,)
        elif kind == "delta":
            family = (waveguide.kappa,)
    if kind == "delta":
        for x in family:
            if x < KAPPA_MIN:
                raise ConfigError("sweep.family",
                                  f"kappa values must be >= {KAPPA_MIN:g}")
    sweep = SweepConfig(kind=kind, grid_min=grid_min, grid_max=grid_max,
                        n_points=int(n_points), log_spaced=log_spaced, family=family,
                        delta_mode=delta_mode)

    return SimConfig(atom=atom, pump=pump, waveguide=waveguide, numerics=numerics,
                     sweep=sweep)


def parse_config(text: str) -> SimConfig:
    """Parse and validate a UTF-8 JSON config document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<document>", f"invalid JSON: {exc}") from exc
    return config_from_dict(doc)


def preset(figure_id: int) -> SimConfig:
    """Built-in configurations for the three reference figures.

    2: velocity sweep of the total force, v in [-5, +5] kappa/k_p,
       401 points, kappa = 1e9 1/s.
    3: friction vs loss rate, 9 log-spaced kappa in [1e8, 1e10] for
       detuning ratios Delta/kappa in {-1, -3, -10}.
    4: friction vs threshold detuning, Delta in [-20, +5] kappa,
       101 points, for kappa in {3e8, 1e9, 3e9}.
    """
    if figure_id == 2:
        return config_from_dict({})
    if figure_id == 3:
        return config_from_dict({
            "sweep": {"kind": "kappa", "grid_min": 1e8, "grid_max": 1e10,
                      "n_points": 9, "log_spaced": True,
                      "family": [-1.0, -3.0, -10.0], "delta_mode": "ratio"},
        })
    if figure_id == 4:
        return config_from_dict({
            "sweep": {"kind": "delta", "grid_min": -20.0, "grid_max": 5.0,
                      "n_points": 101, "log_spaced": False,
                      "family": [3e8, 1e9, 3e9]},
        })
    raise ConfigError("preset", "figure id must be 2, 3 or 4")


def sweep_grid(sweep: SweepConfig) -> list[float]:
    """Grid points for a sweep, in the sweep's own units.

    Linear symmetric ranges are built as signed integer multiples of the
    step so the grid is exactly symmetric about zero; log grids have
    exactly constant ratio.
    """
    n = sweep.n_points
    lo, hi = sweep.grid_min, sweep.grid_max
    if n == 1:
        return [lo]
    if sweep.log_spaced:
        lstep = (math.log(hi) - math.log(lo)) / (n - 1)
        pts = [math.exp(math.log(lo) + i * lstep) for i in range(n)]
        pts[0], pts[-1] = lo, hi
        return pts
    if lo == -hi:
        half = (n - 1) / 2.0
        step = hi / half
        return [(i - half) * step for i in range(n)]
    step = (hi - lo) / (n - 1)
    pts = [lo + i * step for i in range(n)]
    pts[-1] = hi
    return pts
