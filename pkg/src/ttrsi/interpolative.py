"""Row interpolative decomposition from a partial rank-revealing LU (prrLU).

``M ~= X @ M[pivots]`` where ``X[pivots] == I`` exactly. Pivots come from a
greedy fully pivoted LU on the Schur complement, stopped by a rank cap or by a
tolerance relative to the first pivot.
"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .exceptions import DomainError
from .validation import check_int, check_real


@dataclass(frozen=True)
class InterpolativeFactor:
    """Result of a row ID.

    Attributes
    ----------
    x : ndarray, shape (m, rank)
        Interpolation matrix; rows ``pivots`` form the identity.
    pivots : ndarray of int, shape (rank,)
        Selected row indices in selection order.
    skeleton : ndarray, shape (rank, n)
        Copy of the input rows ``pivots``.
    col_pivots : ndarray of int, shape (rank,)
        Columns at which the pivots were found.
    local_error : float
        Largest magnitude left in the Schur complement at termination, 0 if
        the matrix was exhausted.
    converged : bool
        ``False`` when the rank cap stopped the factorization before the
        tolerance was met.
    """

    x: np.ndarray
    pivots: np.ndarray
    skeleton: np.ndarray
    col_pivots: np.ndarray
    local_error: float
    converged: bool

    @property
    def rank(self):
        return len(self.pivots)

    @property
    def shape(self):
        return (self.x.shape[0], self.skeleton.shape[1])


def prrlu_pivots(m, chi_max, eps_id):
    """Greedy full-pivoting LU on a working copy of ``m``.

    Returns ``(rows, cols, L, local_error, converged)`` where ``L`` holds the
    eliminated columns scaled by their pivots, in original row order.
    Ties on the pivot magnitude go to the lowest row-major linear index.
    """
    s = np.array(m, dtype=np.float64, copy=True)
    n_rows, n_cols = s.shape
    cap = min(chi_max, n_rows, n_cols)
    rows, cols, lcols = [], [], []
    first = None
    local_error = 0.0
    converged = True
    while True:
        flat = int(np.argmax(np.abs(s)))
        i, j = divmod(flat, n_cols)
        piv = s[i, j]
        mag = abs(piv)
        if mag == 0.0:
            local_error = 0.0
            break
        if first is None:
            first = mag
        elif mag <= eps_id * first:
            local_error = mag
            break
        if len(rows) == cap:
            local_error = mag
            converged = False
            break
        l = s[:, j] / piv
        u = s[i, :].copy()
        s -= np.outer(l, u)
        s[i, :] = 0.0
        s[:, j] = 0.0
        rows.append(i)
        cols.append(j)
        lcols.append(l)
        if len(rows) == min(n_rows, n_cols):
            local_error = 0.0
            break
    lmat = np.column_stack(lcols) if lcols else np.zeros((n_rows, 0))
    return np.array(rows, dtype=np.intp), np.array(cols, dtype=np.intp), lmat, local_error, converged


def prrlu_row_id(m, chi_max, eps_id):
    """Row interpolative decomposition of a real matrix.

    Parameters
    ----------
    m : array_like, shape (rows, cols)
    chi_max : int
        Maximum number of pivots.
    eps_id : float
        Stop once the largest Schur-complement entry is at most
        ``eps_id`` times the first pivot magnitude.

    Returns
    -------
    InterpolativeFactor
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"expected a nonempty matrix, got shape {m.shape}")
    chi_max = check_int(chi_max, "chi_max", 1)
    eps_id = check_real(eps_id, "eps_id", 0.0)
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")

    rows, cols, lmat, local_error, converged = prrlu_pivots(m, chi_max, eps_id)
    rank = len(rows)
    if rank == 0:
        x = np.zeros((m.shape[0], 0))
    else:
        # X = M[:, J] M[I, J]^{-1} = L L[I]^{-1}; L[I] is unit lower triangular
        xt = solve_triangular(lmat[rows], lmat.T, lower=True, trans="T", unit_diagonal=True)
        x = np.ascontiguousarray(xt.T)
        x[rows] = np.eye(rank)
    return InterpolativeFactor(
        x=x,
        pivots=rows,
        skeleton=m[rows].copy(),
        col_pivots=cols,
        local_error=float(local_error),
        converged=converged,
    )


def id_reconstruct(f):
    """``x @ skeleton``; rows at the pivots reproduce the skeleton exactly."""
    if f.rank == 0:
        return np.zeros(f.shape)
    return f.x @ f.skeleton
