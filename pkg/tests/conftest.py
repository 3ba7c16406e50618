"""Shared fixtures and independent oracle implementations.

The oracles here deliberately use naive nested loops and explicit index
arithmetic so they share no code path with the library.
"""

import numpy as np
import pytest

from qreservoir.randmat import RandomMatrixSpec, random_density_matrix


def naive_partial_trace(matrix, site_dims, keep_sites):
    """Brute-force partial trace: explicit sums over traced basis indices."""
    dims = list(site_dims)
    n = len(dims)
    keep = list(keep_sites)
    traced = [s for s in range(n) if s not in keep]

    def digits(flat, sites):
        # multi-index over `sites`, most significant first
        rev = []
        for s in reversed(sites):
            rev.append(flat % dims[s])
            flat //= dims[s]
        return list(reversed(rev))

    def flat_index(full_digits):
        flat = 0
        for s in range(n):
            flat = flat * dims[s] + full_digits[s]
        return flat

    kept_dim = 1
    for s in keep:
        kept_dim *= dims[s]
    traced_dim = 1
    for s in traced:
        traced_dim *= dims[s]

    out = np.zeros((kept_dim, kept_dim), dtype=complex)
    for row_kept in range(kept_dim):
        row_digits = digits(row_kept, keep)
        for col_kept in range(kept_dim):
            col_digits = digits(col_kept, keep)
            acc = 0.0 + 0.0j
            for t in range(traced_dim):
                t_digits = digits(t, traced)
                row_full = [0] * n
                col_full = [0] * n
                for s, d in zip(keep, row_digits):
                    row_full[s] = d
                for s, d in zip(keep, col_digits):
                    col_full[s] = d
                for s, d in zip(traced, t_digits):
                    row_full[s] = d
                    col_full[s] = d
                acc += matrix[flat_index(row_full), flat_index(col_full)]
            out[row_kept, col_kept] = acc
    return out


def lift_to_full_space(obs, sites, n_spins):
    """Embed an observable on `sites` into the full chain Hilbert space.

    Independent of the library's partial-trace path: the full operator is
    built entry by entry from bit arithmetic (identity on the complement).
    """
    dim = 2**n_spins
    full = np.zeros((dim, dim), dtype=complex)
    others = [s for s in range(n_spins) if s not in sites]

    def sub_index(basis_state, chosen):
        idx = 0
        for s in chosen:
            bit = (basis_state >> (n_spins - 1 - s)) & 1
            idx = idx * 2 + bit
        return idx

    for i in range(dim):
        for j in range(dim):
            if any(
                ((i >> (n_spins - 1 - s)) & 1) != ((j >> (n_spins - 1 - s)) & 1)
                for s in others
            ):
                continue
            full[i, j] = obs[sub_index(i, sites), sub_index(j, sites)]
    return full


@pytest.fixture
def random_three_spin_state():
    def make(seed):
        return random_density_matrix(RandomMatrixSpec(8, 0.8, seed))

    return make
