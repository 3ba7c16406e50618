"""Measurement sets and reservoir state descriptions.

A measurement set is a fixed collection of seeded random Hermitian
observables, each assigned a random subset of chain sites. Describing a
trajectory evaluates every observable on the partial trace of every
recorded state over its assigned sites, giving a (time, feature) matrix
of real expectation values.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import ArgumentError, HermiticityError, ShapeError, SiteIndexError
from .linalg import partial_trace_raw
from .randmat import RandomMatrixSpec, random_hermitian
from .reservoir import ChainConfig, Trajectory, evolve
from .rng import SplitMix64, derive_seed
from .tolerances import IMAG_EXPECTATION_ATOL


@dataclass(frozen=True)
class MeasurementSet:
    """Indexed random observables with per-observable site assignments."""

    observables: tuple[np.ndarray, ...]
    site_sets: tuple[tuple[int, ...], ...]
    n_spins: int
    seed: int
    density: float

    def __post_init__(self) -> None:
        if len(self.observables) != len(self.site_sets):
            raise ArgumentError("observables and site_sets must pair up")
        if len(self.observables) == 0:
            raise ArgumentError("measurement set must not be empty")
        obs = []
        sets = []
        for i, (o, sites) in enumerate(zip(self.observables, self.site_sets)):
            o = np.asarray(o, dtype=complex)
            sites = tuple(int(s) for s in sites)
            if not np.array_equal(o, o.conj().T):
                raise HermiticityError(f"observable {i} is not exactly Hermitian")
            if any(s < 0 or s >= self.n_spins for s in sites):
                raise SiteIndexError(f"observable {i} sites {sites} out of range")
            if any(b <= a for a, b in zip(sites, sites[1:])):
                raise ArgumentError(f"observable {i} sites {sites} not ascending")
            if o.shape[0] != 2 ** len(sites):
                raise ShapeError(
                    f"observable {i} dimension {o.shape[0]} does not match"
                    f" {len(sites)} sites"
                )
            o = o.copy()
            o.flags.writeable = False
            obs.append(o)
            sets.append(sites)
        object.__setattr__(self, "observables", tuple(obs))
        object.__setattr__(self, "site_sets", tuple(sets))

    def __len__(self) -> int:
        return len(self.observables)


def build_measurement_set(
    n_features: int, n_spins: int, obs_spins: int, density: float, seed: int
) -> MeasurementSet:
    """Draw ``n_features`` observables of ``2**obs_spins`` dimension.

    Observable ``i`` uses the derived seed ``derive_seed(seed, i, 0)`` for
    its entries and ``derive_seed(seed, i, 1)`` for its site subset, drawn
    uniformly without replacement and stored ascending.
    """
    if n_features < 1:
        raise ArgumentError("n_features must be >= 1")
    if not 1 <= obs_spins <= n_spins:
        raise ArgumentError(
            f"obs_spins must be in [1, n_spins={n_spins}], got {obs_spins}"
        )
    observables = []
    site_sets = []
    for i in range(n_features):
        spec = RandomMatrixSpec(2**obs_spins, density, derive_seed(seed, i, 0))
        observables.append(random_hermitian(spec))
        sites = SplitMix64(derive_seed(seed, i, 1)).sample_sorted(n_spins, obs_spins)
        site_sets.append(sites)
    return MeasurementSet(tuple(observables), tuple(site_sets), n_spins, seed, density)


def describe(traj: Trajectory, mset: MeasurementSet) -> np.ndarray:
    """Expectation features for every (sample, observable) pair.

    Entry ``[t, i]`` is the expectation of observable ``i`` on the partial
    trace of state ``t`` over the observable's site set; observables that
    cover the whole chain skip the partial trace. Observables sharing a
    site set share one batched reduction over the trajectory.
    """
    if mset.n_spins != traj.n_spins:
        raise ShapeError(
            f"measurement set is for {mset.n_spins} spins,"
            f" trajectory has {traj.n_spins}"
        )
    states = traj.states_array()
    site_dims = traj.states[0].site_dims
    all_sites = tuple(range(mset.n_spins))

    groups: dict[tuple[int, ...], list[int]] = {}
    for i, sites in enumerate(mset.site_sets):
        groups.setdefault(sites, []).append(i)

    out = np.empty((len(traj), len(mset)))
    for sites, indices in groups.items():
        reduced = states if sites == all_sites else partial_trace_raw(
            states, site_dims, sites
        )
        for i in indices:
            col = np.einsum("tij,ji->t", reduced, mset.observables[i])
            worst = float(np.abs(col.imag).max())
            if worst >= IMAG_EXPECTATION_ATOL:
                raise HermiticityError(
                    f"feature column {i} has imaginary part {worst:.3e}"
                )
            out[:, i] = col.real
    return out


def features_to_csv(features: np.ndarray, path) -> None:
    """Write a feature matrix as CSV with header columns f0..f{F-1}."""
    features = np.asarray(features, dtype=float)
    if features.ndim != 2:
        raise ShapeError("features must be 2-D")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"f{i}" for i in range(features.shape[1])])
        for row in features:
            writer.writerow([repr(float(v)) for v in row])


class ReservoirFeaturizer(BaseEstimator, TransformerMixin):
    """Drive series -> reservoir feature matrix, as a sklearn transformer.

    ``fit`` builds the chain configuration and the seeded measurement set;
    ``transform`` evolves the chain through the input series and returns
    the (T, n_features) expectation matrix. Stateless between calls apart
    from the fitted measurement set; transforming the same series twice
    gives identical output.
    """

    def __init__(
        self,
        n_spins: int = 5,
        coupling: float = 1.0,
        drive_axis: str = "z",
        initial_state: str = "staggered_x",
        dephasing_rate: float = 0.0,
        dephasing_axis: str = "z",
        substeps: int = 20,
        sample_dt: float = 0.1,
        n_features: int = 100,
        obs_spins: int = 1,
        density: float = 1.0,
        seed: int = 0,
    ) -> None:
        self.n_spins = n_spins
        self.coupling = coupling
        self.drive_axis = drive_axis
        self.initial_state = initial_state
        self.dephasing_rate = dephasing_rate
        self.dephasing_axis = dephasing_axis
        self.substeps = substeps
        self.sample_dt = sample_dt
        self.n_features = n_features
        self.obs_spins = obs_spins
        self.density = density
        self.seed = seed

    def fit(self, X=None, y=None) -> "ReservoirFeaturizer":
        self.chain_config_ = ChainConfig(
            n_spins=self.n_spins,
            coupling=self.coupling,
            drive_axis=self.drive_axis,
            initial_state=self.initial_state,
            dephasing_rate=self.dephasing_rate,
            dephasing_axis=self.dephasing_axis,
            substeps=self.substeps,
            sample_dt=self.sample_dt,
        )
        self.measurement_set_ = build_measurement_set(
            self.n_features, self.n_spins, self.obs_spins, self.density, self.seed
        )
        return self

    def transform(self, X: Sequence[float]) -> np.ndarray:
        if not hasattr(self, "measurement_set_"):
            self.fit()
        drive = np.asarray(X, dtype=float).reshape(-1)
        traj = evolve(self.chain_config_, drive)
        return describe(traj, self.measurement_set_)
