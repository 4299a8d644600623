"""phaselab: classical Liouville vs quantum Wigner-Moyal phase-space dynamics,
decoherence models, chaos diagnostics, and a reproducible experiment runner."""

from .classical import (LyapunovResult, TrajectoryState,
                        classical_diffusion_coefficient,
                        ensemble_momentum_spread, integrate_trajectory,
                        liouville_step, lyapunov_exponent,
                        standard_map_lyapunov, standard_map_step)
from .decoherence import (DecoherenceConfig, MeasurementSpec, compose_step,
                          diffusion_step, measurement_event)
from .diagnostics import (DiagnosticSeries, break_time, derivative_norm,
                          l2_distance, l2_norm, negativity_volume, norm,
                          purity)
from .errors import (GridMismatchError, NumericalBlowupError, PhaseLabError,
                     ValidationError)
from .grid import PhaseSpaceGrid, make_grid
from .potential import Kick, Potential, potential_derivative
from .quantum import (MoyalConfig, SpectralPropagator, moyal_step,
                      schrodinger_step, wigner_transform)
from .state import (Distribution, PhysicalParams, Wavefunction,
                    check_resolvability, gaussian_wavepacket, init_gaussian)

__version__ = "0.1.0"

__all__ = [
    "PhaseSpaceGrid", "make_grid",
    "Potential", "Kick", "potential_derivative",
    "PhysicalParams", "Distribution", "Wavefunction",
    "init_gaussian", "gaussian_wavepacket", "check_resolvability",
    "liouville_step", "TrajectoryState", "LyapunovResult",
    "integrate_trajectory", "lyapunov_exponent",
    "standard_map_step", "standard_map_lyapunov",
    "ensemble_momentum_spread", "classical_diffusion_coefficient",
    "MoyalConfig", "SpectralPropagator", "moyal_step",
    "schrodinger_step", "wigner_transform",
    "DecoherenceConfig", "MeasurementSpec",
    "diffusion_step", "measurement_event", "compose_step",
    "DiagnosticSeries", "norm", "purity", "negativity_volume",
    "l2_norm", "l2_distance", "derivative_norm", "break_time",
    "PhaseLabError", "ValidationError", "GridMismatchError",
    "NumericalBlowupError",
]
