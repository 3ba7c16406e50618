"""Dense complex linear algebra for composite spin systems.

Conventions: operators are plain ``numpy`` complex arrays; density matrices
are wrapped in :class:`DensityMatrix`, which validates Hermiticity, unit
trace and positive semidefiniteness on construction. Subsystem 0 is the
leftmost (most significant) factor in Kronecker products, so basis index
``b`` of an ``n``-site system has site 0 in its highest bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ArgumentError,
    HermiticityError,
    InvariantError,
    NumericalError,
    ShapeError,
    SiteIndexError,
    SizeLimitError,
)
from .tolerances import (
    EIGENVALUE_FLOOR,
    HERMITICITY_ATOL,
    IMAG_EXPECTATION_ATOL,
    KRON_DIM_LIMIT,
    RECONSTRUCTION_ATOL,
    TRACE_ATOL,
)

# Pauli matrices and the single-spin identity.
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

_EINSUM_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def as_complex_matrix(a, *, name: str = "matrix") -> np.ndarray:
    """Validate and return ``a`` as a square, finite complex128 array."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ShapeError(f"{name} must be at least 1x1")
    if not np.all(np.isfinite(arr)):
        raise NumericalError(f"{name} contains non-finite entries")
    return arr


def hermiticity_defect(a: np.ndarray) -> float:
    """Max entrywise magnitude of ``a - a^dagger``."""
    return float(np.abs(a - a.conj().T).max())


def require_hermitian(a, *, atol: float = HERMITICITY_ATOL, name: str = "matrix") -> np.ndarray:
    """Validate that ``a`` is Hermitian within ``atol`` and return it."""
    arr = as_complex_matrix(a, name=name)
    defect = hermiticity_defect(arr)
    if defect > atol:
        raise HermiticityError(
            f"{name} is not Hermitian within {atol:g} (defect {defect:.3e})"
        )
    return arr


def kron(a, b, *, max_dim: int = KRON_DIM_LIMIT) -> np.ndarray:
    """Kronecker product with a guard against runaway dimensions."""
    a = as_complex_matrix(a, name="a")
    b = as_complex_matrix(b, name="b")
    out_dim = a.shape[0] * b.shape[0]
    if out_dim > max_dim:
        raise SizeLimitError(
            f"kron output dimension {out_dim} exceeds maximum {max_dim}"
        )
    return np.kron(a, b)


def kron_all(factors: Iterable[np.ndarray], *, max_dim: int = KRON_DIM_LIMIT) -> np.ndarray:
    """Left-to-right Kronecker product of a sequence of operators."""
    out = None
    for f in factors:
        out = as_complex_matrix(f) if out is None else kron(out, f, max_dim=max_dim)
    if out is None:
        raise ArgumentError("kron_all needs at least one factor")
    return out


def trace(a) -> complex:
    """Sum of the diagonal."""
    return complex(np.trace(as_complex_matrix(a)))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix with site structure.

    Parameters
    ----------
    matrix:
        Square complex array of dimension ``prod(site_dims)``.
    site_dims:
        Ordered subsystem dimensions (2 per spin for this library).
    """

    matrix: np.ndarray
    site_dims: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        arr = as_complex_matrix(self.matrix, name="density matrix")
        dims = tuple(int(d) for d in self.site_dims) or (arr.shape[0],)
        if any(d < 1 for d in dims):
            raise ArgumentError(f"site_dims must be positive, got {dims}")
        if prod(dims) != arr.shape[0]:
            raise ShapeError(
                f"site_dims {dims} do not multiply to dimension {arr.shape[0]}"
            )
        defect = hermiticity_defect(arr)
        if defect > HERMITICITY_ATOL:
            raise InvariantError(
                f"density matrix not Hermitian (defect {defect:.3e})"
            )
        tr = complex(np.trace(arr))
        if abs(tr - 1.0) > TRACE_ATOL:
            raise InvariantError(f"density matrix trace {tr} is not 1")
        min_eig = float(np.linalg.eigvalsh(arr)[0])
        if min_eig < EIGENVALUE_FLOOR:
            raise InvariantError(
                f"density matrix has eigenvalue {min_eig:.3e} below floor"
            )
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "matrix", arr)
        object.__setattr__(self, "site_dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_sites(self) -> int:
        return len(self.site_dims)

    def purity(self) -> float:
        """tr(rho^2), 1 for pure states."""
        return float(np.einsum("ij,ji->", self.matrix, self.matrix).real)


def partial_trace_raw(
    matrix: np.ndarray, site_dims: Sequence[int], keep_sites: Sequence[int]
) -> np.ndarray:
    """Partial trace on a raw array; no density-matrix validation.

    Works on a single matrix (d, d) or a batch (T, d, d). Traced-out
    subsystems are summed via one einsum over the reshaped tensor.
    """
    dims = tuple(int(d) for d in site_dims)
    n = len(dims)
    keep = tuple(keep_sites)
    batched = matrix.ndim == 3
    lead = matrix.shape[0] if batched else 1
    tensor = matrix.reshape((lead,) + dims + dims)

    if 1 + 2 * n + 1 > len(_EINSUM_LETTERS):
        raise SizeLimitError(f"partial trace supports at most 12 subsystems, got {n}")
    batch_l = _EINSUM_LETTERS[0]
    row = list(_EINSUM_LETTERS[1 : 1 + n])
    col = [
        _EINSUM_LETTERS[1 + n + i] if i in keep else row[i]
        for i in range(n)
    ]
    out_sub = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    spec = batch_l + "".join(row) + "".join(col) + "->" + batch_l + out_sub
    reduced = np.einsum(spec, tensor)

    kept_dim = prod(dims[i] for i in keep)
    reduced = reduced.reshape(lead, kept_dim, kept_dim)
    return reduced if batched else reduced[0]


def _check_keep_sites(keep_sites: Sequence[int], n_sites: int) -> tuple[int, ...]:
    keep = tuple(int(k) for k in keep_sites)
    if len(keep) == 0:
        raise ArgumentError("keep_sites must be nonempty")
    if any(k < 0 or k >= n_sites for k in keep):
        raise SiteIndexError(
            f"keep_sites {keep} out of range for {n_sites} subsystems"
        )
    if any(b <= a for a, b in zip(keep, keep[1:])):
        raise ArgumentError(f"keep_sites must be strictly ascending, got {keep}")
    return keep


def partial_trace(rho: DensityMatrix, keep_sites: Sequence[int]) -> DensityMatrix:
    """Reduce ``rho`` to the subsystems listed in ``keep_sites``.

    ``keep_sites`` must be nonempty, strictly ascending and within range.
    The result is a valid density matrix over the kept sites, in their
    original order.
    """
    keep = _check_keep_sites(keep_sites, rho.n_sites)
    reduced = partial_trace_raw(rho.matrix, rho.site_dims, keep)
    return DensityMatrix(reduced, tuple(rho.site_dims[k] for k in keep))


def expectation(rho: DensityMatrix, obs: np.ndarray) -> float:
    """Re(tr(rho obs)) for a Hermitian observable of matching dimension."""
    obs = require_hermitian(obs, name="observable")
    if obs.shape[0] != rho.dim:
        raise ShapeError(
            f"observable dimension {obs.shape[0]} does not match state {rho.dim}"
        )
    value = complex(np.einsum("ij,ji->", rho.matrix, obs))
    if abs(value.imag) >= IMAG_EXPECTATION_ATOL:
        raise HermiticityError(
            f"expectation has imaginary part {value.imag:.3e}"
        )
    return float(value.real)


def eigenvalues_hermitian(a) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, ascending."""
    arr = require_hermitian(a)
    try:
        return np.linalg.eigvalsh(arr)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"eigenvalue computation failed: {exc}") from exc


def eigh_hermitian(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of a Hermitian matrix.

    The reconstruction ``V diag(w) V^dagger`` must match the input within
    the reconstruction tolerance, else a numerical error is raised.
    """
    arr = require_hermitian(a)
    try:
        w, v = np.linalg.eigh(arr)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    residual = float(np.abs((v * w) @ v.conj().T - arr).max())
    if residual > RECONSTRUCTION_ATOL:
        raise NumericalError(
            f"eigendecomposition residual {residual:.3e} exceeds tolerance"
        )
    return w, v
