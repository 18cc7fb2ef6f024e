"""Random one-cluster-basis sketches of TT tails.

Site ``j`` (0-based, ``j >= 2``) gets a ``k x d_j`` standard normal matrix
``Omega_j``. Applying it to core ``j`` gives the sketched core
``(chi_{j-1}, k, chi_j)``; chaining the sketched cores per sketch column
``kappa`` from the right (a Khatri-Rao product) gives the sketch matrices
``S_j`` of shape ``(chi_{j-1}, k)`` that compress sites ``j..n-1``.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import ShapeError
from .validation import check_int

FIRST_SKETCHED_SITE = 2


def make_omegas(phys_dims, k, seed):
    """One ``k x d_j`` standard normal matrix per site ``2..n-1``.

    Each site draws from its own stream, filled row by row, so the first
    ``k0`` rows do not depend on ``k``: a larger sketch extends a smaller one.
    """
    k = check_int(k, "k", 1)
    seed = tuple(np.atleast_1d(seed).tolist())
    return [
        np.random.default_rng(seed + (site,)).standard_normal((k, d))
        for site, d in enumerate(phys_dims)
        if site >= FIRST_SKETCHED_SITE
    ]


@dataclass(frozen=True)
class SketchBundle:
    """Sketched cores and sketch matrices of one train.

    ``sketch_mats[i]`` belongs to site ``i + 2`` and is stored with every
    column rescaled to unit 2-norm; ``log_scales[i]`` holds the logarithm of
    the factor removed from each column, so the exact matrix is
    ``sketch_mats[i] * exp(log_scales[i])``. Column scaling leaves the row
    interpolation unchanged and keeps long chains from overflowing.
    """

    k: int
    omegas: list
    sketched_cores: list
    sketch_mats: list
    log_scales: list

    def sketch(self, site):
        """Normalized sketch matrix of sites ``site..n-1``."""
        return self.sketch_mats[site - FIRST_SKETCHED_SITE]

    def raw_sketch(self, site):
        i = site - FIRST_SKETCHED_SITE
        return self.sketch_mats[i] * np.exp(self.log_scales[i])


def _normalize_columns(mat):
    norms = np.linalg.norm(mat, axis=0)
    safe = np.where(norms > 0, norms, 1.0)
    return mat / safe, np.log(safe)


def make_sketch_bundle(tt, omegas, k):
    """Backward sweep computing every sketch matrix of ``tt``."""
    k = check_int(k, "k", 1)
    sites = list(range(FIRST_SKETCHED_SITE, tt.n_sites))
    if len(omegas) != len(sites):
        raise ShapeError(f"expected {len(sites)} sketch matrices, got {len(omegas)}")
    sketched = []
    for site, om in zip(sites, omegas):
        d = tt.phys_dims[site]
        if om.shape != (k, d):
            raise ShapeError(f"omega for site {site} has shape {om.shape}, expected {(k, d)}")
        # (k, d) x (r, d, r') -> (r, k, r')
        sketched.append(np.einsum("ks,asb->akb", om, tt.cores[site], optimize=True))
    mats = [None] * len(sites)
    logs = [None] * len(sites)
    nxt = np.ones((1, k))
    nxt_log = np.zeros(k)
    for i in range(len(sites) - 1, -1, -1):
        raw = np.einsum("akb,bk->ak", sketched[i], nxt, optimize=True)
        mats[i], step_log = _normalize_columns(raw)
        logs[i] = nxt_log + step_log
        nxt, nxt_log = mats[i], logs[i]
    return SketchBundle(k=k, omegas=list(omegas), sketched_cores=sketched, sketch_mats=mats, log_scales=logs)


def sketch_flops(tt, k):
    """Operation count of :func:`make_sketch_bundle` for one train."""
    total = 0
    for site in range(FIRST_SKETCHED_SITE, tt.n_sites):
        r, d, r2 = tt.cores[site].shape
        total += 2 * r * d * r2 * k + 2 * r * r2 * k
    return total
