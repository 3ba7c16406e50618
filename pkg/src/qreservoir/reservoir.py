"""Driven isotropic Heisenberg spin chain and its time evolution.

The chain Hamiltonian is ``H(t) = J sum_<ij> (sx sx + sy sy + sz sz)
+ h(t) sum_l s_a`` with open boundaries, Pauli operators and hbar = 1.
An input sequence enters through ``h(t)`` with zero-order hold over each
sample interval and the state is advanced by fixed-step classical RK4.

Integration routes: with ``dephasing_rate == 0`` the initial states are
pure and stay pure, so the wavefunction is integrated (with per-substep
norm projection) and the recorded density matrices are exact rank-one
projectors, Hermitian and positive by construction. With dephasing the
density matrix itself is integrated under
``d rho/dt = -i[H, rho] + rate * sum_l (Z_l rho Z_l - rho)``.

Note that a uniform field commutes with the isotropic exchange and product
states fully polarized along one axis live in the degenerate maximal-spin
multiplet, where the coupling drops out entirely and every observable
collapses to a function of the accumulated drive phase. The ``staggered_x``
initial state (alternating +x / -x polarization) avoids that subspace and
is the default.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ArgumentError,
    IntegrationInstabilityError,
    InvariantError,
    NumericalError,
)
from .linalg import DensityMatrix, IDENTITY_2, PAULI, kron_all
from .tolerances import (
    EIGENVALUE_FLOOR,
    TRACE_ABORT_THRESHOLD,
    TRACE_RENORM_THRESHOLD,
)

MAX_SPINS = 9

INITIAL_STATES = ("staggered_x", "all_plus_x", "all_up_z")

_PLUS_X = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
_MINUS_X = np.array([1.0, -1.0], dtype=complex) / np.sqrt(2.0)
_UP_Z = np.array([1.0, 0.0], dtype=complex)

# Pre-renormalization norm growth beyond this aborts wavefunction RK4;
# norm can only grow when a mode sits outside the RK4 stability interval.
_NORM_GROWTH_ABORT = 1e-9


@dataclass(frozen=True)
class ChainConfig:
    """Static description of the spin-chain reservoir.

    ``coupling`` is the exchange constant J in angular-frequency units;
    values quoted as multiples of pi must be passed multiplied out.
    ``substeps`` RK4 steps are taken per input sample of duration
    ``sample_dt``.

    ``dephasing_axis`` selects the per-site collapse operator of the
    optional dephasing channel; ``relaxation_rate`` adds per-site
    amplitude damping toward the spin-up ground state.

    A uniform field commutes with the isotropic exchange whatever its
    axis, so under purely unitary evolution the input reaches the state
    only through its running integral, and unital dephasing drives the
    state to maximally mixed where the response dies out. Amplitude
    damping is non-unital: it keeps re-pumping the chain so a transverse
    drive (axis orthogonal to z) produces a persistent, history-dependent
    response. That combination is what makes the chain useful as a
    reservoir.
    """

    n_spins: int = 5
    coupling: float = 1.0
    drive_axis: str = "z"
    initial_state: str = "staggered_x"
    dephasing_rate: float = 0.0
    dephasing_axis: str = "z"
    relaxation_rate: float = 0.0
    substeps: int = 20
    sample_dt: float = 0.1

    def __post_init__(self) -> None:
        if not 1 <= self.n_spins <= MAX_SPINS:
            raise ArgumentError(f"n_spins must be in [1, {MAX_SPINS}], got {self.n_spins}")
        if not np.isfinite(self.coupling):
            raise ArgumentError("coupling must be finite")
        if self.drive_axis not in PAULI:
            raise ArgumentError(f"drive_axis must be one of x, y, z, got {self.drive_axis!r}")
        if self.dephasing_axis not in PAULI:
            raise ArgumentError(
                f"dephasing_axis must be one of x, y, z, got {self.dephasing_axis!r}"
            )
        if self.initial_state not in INITIAL_STATES:
            raise ArgumentError(
                f"initial_state must be one of {INITIAL_STATES}, got {self.initial_state!r}"
            )
        if self.dephasing_rate < 0 or self.relaxation_rate < 0:
            raise ArgumentError("dissipation rates must be >= 0")
        if self.substeps < 1:
            raise ArgumentError("substeps must be >= 1")
        if self.sample_dt <= 0:
            raise ArgumentError("sample_dt must be positive")

    @property
    def dim(self) -> int:
        return 2**self.n_spins


@dataclass(frozen=True)
class Trajectory:
    """Recorded density matrices, one per input sample, plus the drive."""

    times: np.ndarray
    states: tuple[DensityMatrix, ...]
    drive: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        drive = np.asarray(self.drive, dtype=float)
        if not (len(times) == len(self.states) == len(drive)):
            raise ArgumentError("times, states and drive must have equal lengths")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "drive", drive)
        object.__setattr__(self, "states", tuple(self.states))

    def __len__(self) -> int:
        return len(self.states)

    @property
    def n_spins(self) -> int:
        return self.states[0].n_sites

    def states_array(self) -> np.ndarray:
        """(T, dim, dim) stack of the recorded density matrices."""
        return np.stack([s.matrix for s in self.states])


def site_operator(op: np.ndarray, site: int, n_spins: int) -> np.ndarray:
    """Lift a single-spin operator onto ``site`` of an ``n_spins`` chain."""
    if not 0 <= site < n_spins:
        raise ArgumentError(f"site {site} out of range for {n_spins} spins")
    factors = [IDENTITY_2] * n_spins
    factors[site] = op
    return kron_all(factors)


def build_static_hamiltonian(config: ChainConfig) -> np.ndarray:
    """Open-boundary isotropic exchange term J sum_i vec(s)_i . vec(s)_i+1."""
    n = config.n_spins
    dim = config.dim
    h0 = np.zeros((dim, dim), dtype=complex)
    for i in range(n - 1):
        for pauli in PAULI.values():
            h0 += site_operator(pauli, i, n) @ site_operator(pauli, i + 1, n)
    return config.coupling * h0


def build_drive_operator(config: ChainConfig) -> np.ndarray:
    """Uniform-field operator sum_l s_a on every site."""
    n = config.n_spins
    pauli = PAULI[config.drive_axis]
    out = np.zeros((config.dim, config.dim), dtype=complex)
    for site in range(n):
        out += site_operator(pauli, site, n)
    return out


def initial_state_vector(config: ChainConfig) -> np.ndarray:
    """Product initial wavefunction selected by ``config.initial_state``."""
    if config.initial_state == "all_plus_x":
        factors = [_PLUS_X] * config.n_spins
    elif config.initial_state == "all_up_z":
        factors = [_UP_Z] * config.n_spins
    else:  # staggered_x
        factors = [_PLUS_X if i % 2 == 0 else _MINUS_X for i in range(config.n_spins)]
    psi = factors[0]
    for f in factors[1:]:
        psi = np.kron(psi, f)
    return psi


def initial_state(config: ChainConfig) -> DensityMatrix:
    """Product initial state selected by ``config.initial_state``."""
    psi = initial_state_vector(config)
    return DensityMatrix(np.outer(psi, psi.conj()), (2,) * config.n_spins)


def spectral_spread(config: ChainConfig) -> float:
    """Eigenvalue spread of the static Hamiltonian (stability sizing aid)."""
    if config.n_spins == 1 or config.coupling == 0.0:
        return 0.0
    w = np.linalg.eigvalsh(build_static_hamiltonian(config))
    return float(w[-1] - w[0])


def _make_lindblad_rhs(config: ChainConfig):
    """Build the density-matrix right-hand side as ``rhs(rho, c)`` where
    ``c`` is the per-sample generator matrix from :func:`_sample_generator`.

    The commutator and the relaxation anticommutator are fused into
    ``c rho + (c rho)^dagger`` (valid because every RK4 stage input stays
    Hermitian). Dephasing along z is an entrywise weight; x/y dephasing
    conjugations reduce to a site-bit permutation with a sign pattern;
    relaxation gains ``rate * s-_l rho s+_l`` are gathered through
    precomputed index meshes.
    """
    n = config.n_spins
    dim = config.dim
    basis = np.arange(dim)
    z_signs = [
        np.where((basis >> (n - 1 - site)) & 1 == 0, 1.0, -1.0) for site in range(n)
    ]

    deph_weights = None
    deph_perm = None
    if config.dephasing_rate > 0.0:
        rate = config.dephasing_rate
        if config.dephasing_axis == "z":
            deph_weights = rate * (sum(np.outer(z, z) for z in z_signs) - n)
        else:
            flips = [basis ^ (1 << (n - 1 - site)) for site in range(n)]
            if config.dephasing_axis == "x":
                sign_grids = [None] * n
            else:  # y: bit flip with the sigma_z sign pattern
                sign_grids = [np.outer(z, z) for z in z_signs]

            def deph_perm(rho: np.ndarray) -> np.ndarray:
                out = -float(n) * rho
                for flip, signs in zip(flips, sign_grids):
                    piece = rho[np.ix_(flip, flip)]
                    out += piece if signs is None else signs * piece
                return rate * out

    relax_meshes = None
    relax_rate = config.relaxation_rate
    if relax_rate > 0.0:
        up_sets = [
            np.nonzero(((basis >> (n - 1 - site)) & 1) == 0)[0] for site in range(n)
        ]
        relax_meshes = [
            (
                (up[:, None], up[None, :]),
                ((up | (1 << (n - 1 - site)))[:, None], (up | (1 << (n - 1 - site)))[None, :]),
            )
            for site, up in enumerate(up_sets)
        ]

    def rhs(rho: np.ndarray, c: np.ndarray) -> np.ndarray:
        tmp = c @ rho
        out = tmp + tmp.conj().T
        if deph_weights is not None:
            out += deph_weights * rho
        if deph_perm is not None:
            out += deph_perm(rho)
        if relax_meshes is not None:
            for up_mesh, down_mesh in relax_meshes:
                out[up_mesh] += relax_rate * rho[down_mesh]
        return out

    return rhs


def _loss_generator(config: ChainConfig) -> np.ndarray:
    """Static non-Hermitian generator part: -(rate/2) diag(excitations).

    With c = -iH + loss, the Hermitian mirror ``c rho + (c rho)^dagger``
    reproduces both the commutator and the relaxation anticommutator.
    """
    n = config.n_spins
    basis = np.arange(config.dim)
    excitations = sum(
        ((basis >> (n - 1 - site)) & 1).astype(float) for site in range(n)
    )
    return -0.5 * config.relaxation_rate * np.diag(excitations).astype(complex)


def evolve(config: ChainConfig, drive: Sequence[float]) -> Trajectory:
    """Integrate the driven chain through an input sequence.

    Each input value is held constant over one ``sample_dt`` interval
    (zero-order hold) while the state is advanced by ``substeps`` classical
    RK4 steps; the state after each sample is recorded and re-validated.
    Trace drift beyond 1e-12 is renormalized and drift beyond 1e-6 aborts
    with an instability error, as does any other invariant failure or norm
    growth (a mode outside the RK4 stability interval).
    """
    drive_arr = np.asarray(drive, dtype=float)
    if drive_arr.ndim != 1 or len(drive_arr) == 0:
        raise ArgumentError("drive must be a nonempty 1-D sequence")
    if not np.all(np.isfinite(drive_arr)):
        raise NumericalError("drive contains non-finite values")

    if config.dephasing_rate == 0.0 and config.relaxation_rate == 0.0:
        states = _evolve_wavefunction(config, drive_arr)
    else:
        states = _evolve_density_matrix(config, drive_arr)

    times = (1 + np.arange(len(drive_arr))) * config.sample_dt
    return Trajectory(times, states, drive_arr)


def _evolve_wavefunction(
    config: ChainConfig, drive: np.ndarray
) -> tuple[DensityMatrix, ...]:
    h0 = build_static_hamiltonian(config)
    d_op = build_drive_operator(config)
    psi = initial_state_vector(config)
    dt = config.sample_dt / config.substeps
    site_dims = (2,) * config.n_spins

    states: list[DensityMatrix] = []
    for k, u in enumerate(drive):
        h = h0 + u * d_op
        for _ in range(config.substeps):
            k1 = -1j * (h @ psi)
            k2 = -1j * (h @ (psi + 0.5 * dt * k1))
            k3 = -1j * (h @ (psi + 0.5 * dt * k2))
            k4 = -1j * (h @ (psi + dt * k3))
            psi = psi + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
            norm2 = float(np.real(np.vdot(psi, psi)))
            if not np.isfinite(norm2):
                raise NumericalError(
                    f"non-finite state during sample {k}; reduce the step size"
                )
            if norm2 > 1.0 + _NORM_GROWTH_ABORT:
                raise IntegrationInstabilityError(
                    f"norm growth during sample {k}; increase substeps"
                )
            # Projection back onto the unit sphere (RK4 is mildly
            # dissipative inside its stability interval).
            psi = psi / np.sqrt(norm2)
        norm2 = float(np.real(np.vdot(psi, psi)))
        drift = abs(norm2 - 1.0)
        if drift > TRACE_ABORT_THRESHOLD:
            raise IntegrationInstabilityError(
                f"trace drift {drift:.3e} after sample {k}; increase substeps"
            )
        if drift > TRACE_RENORM_THRESHOLD:
            psi = psi / np.sqrt(norm2)
        states.append(DensityMatrix(np.outer(psi, psi.conj()), site_dims))
    return tuple(states)


def _evolve_density_matrix(
    config: ChainConfig, drive: np.ndarray
) -> tuple[DensityMatrix, ...]:
    c_static = -1j * build_static_hamiltonian(config) + _loss_generator(config)
    c_drive = -1j * build_drive_operator(config)
    rhs = _make_lindblad_rhs(config)
    psi0 = initial_state_vector(config)
    rho = np.outer(psi0, psi0.conj())
    dt = config.sample_dt / config.substeps
    site_dims = (2,) * config.n_spins

    states: list[DensityMatrix] = []
    for k, u in enumerate(drive):
        c = c_static + u * c_drive
        for _ in range(config.substeps):
            k1 = rhs(rho, c)
            k2 = rhs(rho + 0.5 * dt * k1, c)
            k3 = rhs(rho + 0.5 * dt * k2, c)
            k4 = rhs(rho + dt * k3, c)
            rho = rho + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        if not np.all(np.isfinite(rho)):
            raise NumericalError(
                f"non-finite state after sample {k}; reduce the step size"
            )
        tr = float(np.trace(rho).real)
        drift = abs(tr - 1.0)
        if drift > TRACE_ABORT_THRESHOLD:
            raise IntegrationInstabilityError(
                f"trace drift {drift:.3e} after sample {k}; increase substeps"
            )
        if drift > TRACE_RENORM_THRESHOLD:
            rho = rho / tr
        rho = _project_spectrum(rho, k)
        try:
            state = DensityMatrix(rho.copy(), site_dims)
        except InvariantError as exc:
            raise IntegrationInstabilityError(
                f"state invariant failed after sample {k} ({exc}); increase substeps"
            ) from exc
        states.append(state)
    return tuple(states)


def _project_spectrum(rho: np.ndarray, sample: int) -> np.ndarray:
    """Clip trace-scale eigenvalue drift; abort on larger violations.

    Mirrors the trace rule: truncation drift within (floor, 1e-6] is
    projected away (eigenvalues clipped at zero, trace renormalized),
    anything beyond 1e-6 is integration instability.
    """
    herm = 0.5 * (rho + rho.conj().T)
    w, v = np.linalg.eigh(herm)
    if w[0] >= EIGENVALUE_FLOOR:
        return rho
    if w[0] < -TRACE_ABORT_THRESHOLD:
        raise IntegrationInstabilityError(
            f"eigenvalue drift {w[0]:.3e} after sample {sample}; increase substeps"
        )
    w = np.clip(w, 0.0, None)
    projected = (v * w) @ v.conj().T
    return projected / float(np.trace(projected).real)


