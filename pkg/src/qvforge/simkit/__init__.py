"""Circuit simulation: exact statevector, noisy trajectories, density oracle."""

from .density import exact_distribution, final_density
from .exact import run_states, simulate_ideal, unitary_of
from .noise import (
    DEFAULT_QUASISTATIC_SIGMA,
    NoiseError,
    NoiseModel,
    assignment_matrix,
    from_device,
    load_noise,
    noise_from_json,
    noise_to_json,
    prepared_zero_error,
    qubit_assignment,
    qubit_confusion,
    save_noise,
    scale_noise,
    total_assignment_error,
    zero_noise,
)
from .statevec import backend_name
from .trajectories import ShotCounts, simulate_noisy

__all__ = [
    "DEFAULT_QUASISTATIC_SIGMA",
    "NoiseError",
    "NoiseModel",
    "ShotCounts",
    "assignment_matrix",
    "backend_name",
    "exact_distribution",
    "final_density",
    "from_device",
    "load_noise",
    "noise_from_json",
    "noise_to_json",
    "prepared_zero_error",
    "qubit_assignment",
    "qubit_confusion",
    "run_states",
    "save_noise",
    "scale_noise",
    "simulate_ideal",
    "simulate_noisy",
    "total_assignment_error",
    "unitary_of",
    "zero_noise",
]
