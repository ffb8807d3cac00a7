"""Velocity-dependent optical forces on a polarizable particle in a lossy
waveguide: dispersion model, stationary atom state, mean force, friction
coefficient and figure-reproducing parameter sweeps."""

from .model import (
    C_LIGHT,
    HBAR,
    AtomParams,
    Branch,
    NonPropagatingPump,
    PumpParams,
    WaveguideModel,
    branch_frequency,
    coupling_sq,
    detuning,
    group_velocity,
    pump_wavenumber,
    transverse_amplitude,
)
from .quadrature import (
    NumericsConfig,
    QuadratureFailure,
    find_resonances,
    integrate_branch,
    oracle_trapezoid,
)
from .steady_state import ComplexShift, SystemState, excitation, waveguide_shift
from .forces import (
    DerivativeMismatch,
    ForceResult,
    FrictionResult,
    NoSignChange,
    capture_range,
    free_space_friction_max,
    friction_coefficient,
    single_pump_force,
    total_force,
)
from .sweeps import FitResult, NonPositiveValue, SweepRow, power_law_fit, run_sweep
from .config import (
    ConfigError,
    SimConfig,
    config_from_dict,
    parse_config,
    preset,
    sweep_grid,
)

__version__ = "0.1.0"
