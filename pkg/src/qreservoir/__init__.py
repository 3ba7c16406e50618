"""Quantum reservoir computing on a driven Heisenberg spin chain with
random-matrix measurements and a trainable readout."""

from .errors import QReservoirError
from .features import (
    MeasurementSet,
    ReservoirFeaturizer,
    build_measurement_set,
    describe,
)
from .linalg import (
    DensityMatrix,
    eigenvalues_hermitian,
    eigh_hermitian,
    expectation,
    kron,
    partial_trace,
    trace,
)
from .randmat import (
    RandomMatrixSpec,
    measurement_statistics_study,
    random_density_matrix,
    random_hermitian,
    spectrum_study,
)
from .readout import Readout, ReadoutParams, pearson
from .reservoir import ChainConfig, Trajectory, evolve, initial_state
from .rng import SplitMix64, derive_seed
from .tasks import (
    SplitPlan,
    TimeSeries,
    cubic_hermite_interpolate,
    cubic_spline_interpolate,
    gen_cosine,
    gen_mackey_glass,
    gen_random_walk,
    load_price_csv,
    split,
    subsample,
)
from .experiments import (
    ExperimentConfig,
    RunReport,
    ScanResult,
    config_from_dict,
    default_config,
    emit_report,
    run_interpolation,
    run_mackey_glass,
    run_open_loop,
    run_scan,
)

__version__ = "0.1.0"

__all__ = [
    "ChainConfig",
    "DensityMatrix",
    "ExperimentConfig",
    "MeasurementSet",
    "QReservoirError",
    "RandomMatrixSpec",
    "Readout",
    "ReadoutParams",
    "ReservoirFeaturizer",
    "RunReport",
    "ScanResult",
    "SplitMix64",
    "SplitPlan",
    "TimeSeries",
    "Trajectory",
    "build_measurement_set",
    "config_from_dict",
    "cubic_hermite_interpolate",
    "cubic_spline_interpolate",
    "default_config",
    "derive_seed",
    "describe",
    "eigenvalues_hermitian",
    "eigh_hermitian",
    "emit_report",
    "evolve",
    "expectation",
    "gen_cosine",
    "gen_mackey_glass",
    "gen_random_walk",
    "initial_state",
    "kron",
    "load_price_csv",
    "measurement_statistics_study",
    "partial_trace",
    "pearson",
    "random_density_matrix",
    "random_hermitian",
    "run_interpolation",
    "run_mackey_glass",
    "run_open_loop",
    "run_scan",
    "split",
    "spectrum_study",
    "subsample",
    "trace",
]
