"""Seeded random Hermitian observables, random density matrices and the
two diversity studies (eigenvalue spectra, expectation statistics).

The observable ensemble is deliberately not GUE: each upper-triangle entry
(diagonal included) is independently nonzero with probability ``density``;
nonzero off-diagonal entries have real and imaginary parts uniform on
[-1, 1], nonzero diagonal entries are real uniform on [-1, 1], and the
lower triangle mirrors the upper by conjugation. Draw order is fixed
(upper triangle, row-major, three stream uniforms per entry), so output is
bit-identical for identical specs.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ArgumentError
from .linalg import DensityMatrix, expectation, partial_trace, eigenvalues_hermitian
from .rng import MASK64, SplitMix64, derive_seed

_MAX_DIM = 512


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class RandomMatrixSpec:
    """Dimension, sparsity and seed for one random Hermitian draw."""

    dim: int
    density: float
    seed: int

    def __post_init__(self) -> None:
        if not _is_power_of_two(self.dim) or self.dim > _MAX_DIM:
            raise ArgumentError(
                f"dim must be a power of two in [1, {_MAX_DIM}], got {self.dim}"
            )
        if not 0.0 <= self.density <= 1.0:
            raise ArgumentError(f"density must be in [0, 1], got {self.density}")


def random_hermitian(spec: RandomMatrixSpec) -> np.ndarray:
    """Draw one random Hermitian matrix; exactly equal to its own dagger."""
    dim = spec.dim
    rng = SplitMix64(spec.seed)
    iu, ju = np.triu_indices(dim)
    u = rng.uniforms(3 * len(iu)).reshape(-1, 3)
    nonzero = u[:, 0] < spec.density
    re = np.where(nonzero, 2.0 * u[:, 1] - 1.0, 0.0)
    im = np.where(nonzero & (iu != ju), 2.0 * u[:, 2] - 1.0, 0.0)

    out = np.zeros((dim, dim), dtype=complex)
    out[iu, ju] = re + 1j * im
    out[ju, iu] = re - 1j * im
    return out


def random_density_matrix(spec: RandomMatrixSpec) -> DensityMatrix:
    """rho = A A^dagger / tr(A A^dagger) from a random Hermitian A.

    A zero draw (possible at low density) is retried with the seed
    incremented until a nonzero matrix appears.
    """
    seed = spec.seed
    while True:
        a = random_hermitian(RandomMatrixSpec(spec.dim, spec.density, seed))
        gram = a @ a.conj().T
        tr = float(np.trace(gram).real)
        if tr > 0.0:
            break
        seed = (seed + 1) & MASK64
    n_sites = spec.dim.bit_length() - 1
    site_dims = (2,) * n_sites if n_sites else (1,)
    return DensityMatrix(gram / tr, site_dims)


def _write_csv(header: Sequence[str], rows, path) -> None:
    # UTF-8, LF line endings, '.' decimal separator; repr round-trips floats.
    def fmt(v):
        return repr(float(v)) if isinstance(v, float) else v

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


@dataclass(frozen=True)
class SpectrumTable:
    """Pooled eigenvalues per (dim, density) cell, one row per eigenvalue."""

    rows: tuple[tuple[int, float, float], ...]

    header = ("dim", "density", "eigenvalue")

    def to_csv(self, path) -> None:
        _write_csv(self.header, self.rows, path)

    def to_csv_text(self) -> str:
        return _csv_text(self.header, self.rows)

    def eigenvalues(self, dim: int, density: float) -> np.ndarray:
        return np.array(
            [r[2] for r in self.rows if r[0] == dim and r[1] == density]
        )


def spectrum_study(
    dims: Sequence[int],
    densities: Sequence[float],
    samples_per_cell: int,
    seed: int,
) -> SpectrumTable:
    """Pooled spectra of random Hermitian draws over a (dim, density) grid.

    Each draw is seeded with ``derive_seed(seed, i_dim, i_density, i_sample)``
    so cells and samples are independent and order-free.
    """
    if samples_per_cell < 1:
        raise ArgumentError("samples_per_cell must be >= 1")
    rows: list[tuple[int, float, float]] = []
    for i_dim, dim in enumerate(dims):
        for i_den, density in enumerate(densities):
            for i_s in range(samples_per_cell):
                spec = RandomMatrixSpec(
                    int(dim), float(density), derive_seed(seed, i_dim, i_den, i_s)
                )
                for ev in eigenvalues_hermitian(random_hermitian(spec)):
                    rows.append((int(dim), float(density), float(ev)))
    return SpectrumTable(tuple(rows))


@dataclass(frozen=True)
class MeasurementTable:
    """Expectation samples per observable dimension."""

    rows: tuple[tuple[int, float], ...]

    header = ("obs_dim", "expectation")

    def to_csv(self, path) -> None:
        _write_csv(self.header, self.rows, path)

    def to_csv_text(self) -> str:
        return _csv_text(self.header, self.rows)

    def expectations(self, obs_dim: int) -> np.ndarray:
        return np.array([r[1] for r in self.rows if r[0] == obs_dim])


def measurement_statistics_study(
    full_spins: int = 9,
    obs_dims: Sequence[int] = (2, 8, 32, 128, 512),
    samples: int = 500,
    seed: int = 0,
    density: float = 1.0,
    observable_override: np.ndarray | None = None,
) -> MeasurementTable:
    """Expectations of random observables on random subsystems.

    For every observable dimension and sample: draw a random density matrix
    of the full ``2**full_spins`` system, choose a uniform random site
    subset of size ``log2(obs_dim)``, reduce onto it by partial trace
    (skipped when the observable covers the full system) and record the
    expectation of a fresh random Hermitian observable.

    ``observable_override`` substitutes a fixed observable for every draw
    (testing hook, e.g. the identity).
    """
    full_dim = 2**full_spins
    rows: list[tuple[int, float]] = []
    for i_obs, obs_dim in enumerate(obs_dims):
        obs_dim = int(obs_dim)
        if not _is_power_of_two(obs_dim) or obs_dim > full_dim:
            raise ArgumentError(
                f"obs_dim {obs_dim} must be a power of two <= {full_dim}"
            )
        obs_spins = obs_dim.bit_length() - 1
        for i_s in range(samples):
            rho = random_density_matrix(
                RandomMatrixSpec(full_dim, density, derive_seed(seed, i_obs, i_s, 0))
            )
            if obs_dim < full_dim:
                sites = SplitMix64(derive_seed(seed, i_obs, i_s, 1)).sample_sorted(
                    full_spins, obs_spins
                )
                rho = partial_trace(rho, sites)
            if observable_override is not None:
                obs = observable_override
            else:
                obs = random_hermitian(
                    RandomMatrixSpec(obs_dim, density, derive_seed(seed, i_obs, i_s, 2))
                )
            rows.append((obs_dim, expectation(rho, obs)))
    return MeasurementTable(tuple(rows))
