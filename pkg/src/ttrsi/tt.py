"""Tensor-train container and the exact/SVD-based operations on it.

Cores are real float64 arrays with axes ``(left bond, physical, right bond)``.
A :class:`TensorTrain` is immutable; every operation returns a new train.
"""
import json
import math

import numpy as np

from .exceptions import CapacityError, DomainError, ShapeError
from .validation import check_compatible, check_int, check_real, check_tensor_train

#: Largest number of entries any dense oracle may allocate.
DENSE_CAP = 2**26

FORMAT_VERSION = 1


class TensorTrain:
    """An order-n tensor stored as a chain of order-3 cores.

    Parameters
    ----------
    cores : sequence of array_like
        Core ``j`` has shape ``(chi_{j-1}, d_j, chi_j)`` with ``chi_0 = chi_n = 1``.
    copy : bool
        Copy the arrays before freezing them. Internal callers that just built
        fresh arrays pass ``False``.
    """

    __slots__ = ("_cores",)

    def __init__(self, cores, copy=True):
        frozen = []
        for core in cores:
            arr = np.array(core, dtype=np.float64, copy=True if copy else None, order="C")
            arr.flags.writeable = False
            frozen.append(arr)
        self._cores = tuple(frozen)
        check_tensor_train(self)

    @property
    def cores(self):
        return self._cores

    @property
    def n_sites(self):
        return len(self._cores)

    @property
    def phys_dims(self):
        return tuple(c.shape[1] for c in self._cores)

    @property
    def bond_dims(self):
        """Internal bond dimensions ``chi_1 .. chi_{n-1}``."""
        return tuple(c.shape[2] for c in self._cores[:-1])

    @property
    def max_bond(self):
        return max(self.bond_dims)

    @property
    def size(self):
        return math.prod(self.phys_dims)

    def __len__(self):
        return len(self._cores)

    def __repr__(self):
        return (
            f"TensorTrain(n_sites={self.n_sites}, phys_dims={list(self.phys_dims)}, "
            f"bond_dims={list(self.bond_dims)})"
        )

    def __getitem__(self, idx):
        return tt_eval(self, idx)

    def scaled(self, factor):
        """Return a copy with the first core multiplied by ``factor``."""
        cores = list(self._cores)
        cores[0] = cores[0] * float(factor)
        return TensorTrain(cores, copy=False)

    def to_dense(self, cap=DENSE_CAP):
        return tt_to_dense(self, cap=cap)


def _check_cap(size, cap):
    if size > cap:
        raise CapacityError(f"dense tensor of {size} entries exceeds the cap of {cap}")


def tt_eval(tt, idx):
    """Value of the tensor at a full multi-index."""
    idx = tuple(idx)
    if len(idx) != tt.n_sites:
        raise IndexError(f"expected {tt.n_sites} indices, got {len(idx)}")
    vec = np.ones(1)
    for j, (core, s) in enumerate(zip(tt.cores, idx)):
        if not 0 <= s < core.shape[1]:
            raise IndexError(f"index {s} out of range for site {j} of size {core.shape[1]}")
        vec = vec @ core[:, s, :]
    return float(vec[0])


def tt_eval_many(tt, indices):
    """Vectorized :func:`tt_eval` over the rows of an ``(m, n)`` integer array."""
    indices = np.asarray(indices, dtype=np.intp)
    if indices.ndim != 2 or indices.shape[1] != tt.n_sites:
        raise IndexError(f"expected an (m, {tt.n_sites}) index array, got shape {indices.shape}")
    dims = np.asarray(tt.phys_dims)
    if np.any(indices < 0) or np.any(indices >= dims):
        raise IndexError("multi-index out of range")
    vec = np.ones((indices.shape[0], 1))
    for j, core in enumerate(tt.cores):
        vec = np.einsum("ma,mab->mb", vec, core[:, indices[:, j], :].transpose(1, 0, 2))
    return vec[:, 0]


def tt_to_dense(tt, cap=DENSE_CAP):
    """Contract the whole train into an ndarray of shape ``phys_dims``."""
    _check_cap(tt.size, cap)
    out = tt.cores[0].reshape(-1, tt.cores[0].shape[2])
    for core in tt.cores[1:]:
        r, d, r_next = core.shape
        out = (out @ core.reshape(r, d * r_next)).reshape(-1, r_next)
    return out.reshape(tt.phys_dims)


def _truncation_rank(s, tol, chi_max):
    """Smallest rank whose discarded singular values have 2-norm <= tol."""
    if s.size == 0 or s[0] == 0.0:
        return 1
    tail = np.sqrt(np.cumsum(s[::-1] ** 2))[::-1]  # tail[r] = ||s[r:]||
    keep = int(np.count_nonzero(tail > tol))
    return max(1, min(keep, chi_max, s.size))


def tt_from_dense(dense, chi_max, eps, cap=DENSE_CAP):
    """TT-SVD: left-to-right sweep of truncated SVDs.

    Each unfolding is truncated at ``min(chi_max, r)`` where ``r`` is the
    smallest rank whose discarded mass is at most ``eps * ||dense|| / sqrt(n - 1)``,
    so the total relative error is at most ``eps`` when ``chi_max`` does not bind.
    """
    dense = np.asarray(dense, dtype=np.float64)
    chi_max = check_int(chi_max, "chi_max", 1)
    eps = check_real(eps, "eps", 0.0)
    if dense.ndim < 2:
        raise ShapeError("a tensor train needs at least two sites")
    _check_cap(dense.size, cap)
    dims = dense.shape
    n = len(dims)
    delta = eps * float(np.linalg.norm(dense)) / math.sqrt(n - 1)
    cores = []
    rest = dense.reshape(1, -1)
    r = 1
    for j in range(n - 1):
        mat = rest.reshape(r * dims[j], -1)
        u, s, vt = np.linalg.svd(mat, full_matrices=False)
        rank = _truncation_rank(s, delta, chi_max)
        cores.append(u[:, :rank].reshape(r, dims[j], rank))
        rest = s[:rank, None] * vt[:rank]
        r = rank
    cores.append(rest.reshape(r, dims[-1], 1))
    return TensorTrain(cores, copy=False)


def tt_hadamard_direct(a, b):
    """Exact elementwise product via core-wise Kronecker products.

    The bond dimensions of the result are the products of the input bonds.
    """
    check_compatible(a, b)
    return TensorTrain(kron_cores(a, b), copy=False)


def kron_cores(a, b):
    """Cores of the exact product as a plain list."""
    cores = []
    for ca, cb in zip(a.cores, b.cores):
        ra, d, ra2 = ca.shape
        rb, _, rb2 = cb.shape
        c = np.einsum("isk,jsl->ijskl", ca, cb, optimize=True)
        cores.append(c.reshape(ra * rb, d, ra2 * rb2))
    return cores


def _right_orthogonalize(cores):
    """In-place right-to-left QR sweep; returns the list with core 0 carrying the norm."""
    for j in range(len(cores) - 1, 0, -1):
        r, d, r_next = cores[j].shape
        q, rr = np.linalg.qr(cores[j].reshape(r, d * r_next).T)
        cores[j] = q.T.reshape(-1, d, r_next)
        prev = cores[j - 1]
        cores[j - 1] = (prev.reshape(-1, r) @ rr.T).reshape(prev.shape[0], prev.shape[1], -1)
    return cores


def tt_round(tt, chi_max, eps):
    """TT-rounding: right-to-left orthogonalization then left-to-right truncated SVD.

    Every bond is truncated at the smallest rank whose discarded singular mass
    is at most ``eps * ||tt||``, capped at ``chi_max``. With ``chi_max`` not
    binding the relative error is at most ``eps * sqrt(n - 1)``.
    """
    return round_cores(list(tt.cores), chi_max, eps)


def round_cores(cores, chi_max, eps):
    """:func:`tt_round` on a list of cores; list entries are replaced as the sweep goes."""
    chi_max = check_int(chi_max, "chi_max", 1)
    eps = check_real(eps, "eps", 0.0)
    cores = _right_orthogonalize(cores)
    tol = eps * float(np.linalg.norm(cores[0]))
    for j in range(len(cores) - 1):
        r, d, r_next = cores[j].shape
        u, s, vt = np.linalg.svd(cores[j].reshape(r * d, r_next), full_matrices=False)
        rank = _truncation_rank(s, tol, chi_max)
        cores[j] = u[:, :rank].reshape(r, d, rank)
        carry = s[:rank, None] * vt[:rank]
        nxt = cores[j + 1]
        cores[j + 1] = (carry @ nxt.reshape(r_next, -1)).reshape(rank, nxt.shape[1], -1)
    return TensorTrain(cores, copy=False)


def tt_inner(a, b):
    """Sum over all indices of ``a * b`` by transfer-matrix contraction."""
    check_compatible(a, b)
    env = np.ones((1, 1))
    for ca, cb in zip(a.cores, b.cores):
        tmp = np.tensordot(env, ca, axes=(0, 0))  # (rb, d, ra')
        env = np.tensordot(tmp, cb, axes=([0, 1], [0, 1]))  # (ra', rb')
    return float(env[0, 0])


def tt_norm(tt):
    """Frobenius norm computed from a QR sweep (no squaring, so no cancellation)."""
    r = np.ones((1, 1))
    for core in tt.cores:
        rl, d, rn = core.shape
        mat = (r @ core.reshape(rl, d * rn)).reshape(-1, rn)
        r = np.linalg.qr(mat, mode="r")
    return float(np.linalg.norm(r))


def tt_add(a, b, alpha=1.0, beta=1.0):
    """Exact sum ``alpha * a + beta * b`` with block-diagonal cores."""
    check_compatible(a, b)
    n = a.n_sites
    cores = []
    for j, (ca, cb) in enumerate(zip(a.cores, b.cores)):
        if j == 0:
            cores.append(np.concatenate([alpha * ca, beta * cb], axis=2))
        elif j == n - 1:
            cores.append(np.concatenate([ca, cb], axis=0))
        else:
            ra, d, ra2 = ca.shape
            rb, _, rb2 = cb.shape
            c = np.zeros((ra + rb, d, ra2 + rb2))
            c[:ra, :, :ra2] = ca
            c[ra:, :, ra2:] = cb
            cores.append(c)
    return TensorTrain(cores, copy=False)


def relative_error(approx, truth):
    """Relative Frobenius distance ``||truth - approx|| / ||truth||``.

    Norms are taken from QR sweeps of ``truth`` and of the difference train,
    which keeps the result accurate down to ~1e-15 instead of the ~1e-8 floor
    of expanding the squared norm into inner products.
    """
    check_compatible(approx, truth)
    denom = tt_norm(truth)
    if denom == 0.0:
        raise DomainError("relative error is undefined for a zero reference tensor")
    diff = tt_add(truth, approx, 1.0, -1.0)
    return max(0.0, tt_norm(diff)) / denom


def exact_rank_bounds(phys_dims):
    """Largest possible TT rank at each internal cut."""
    n = len(phys_dims)
    return [
        min(math.prod(phys_dims[: j + 1]), math.prod(phys_dims[j + 1 :]))
        for j in range(n - 1)
    ]


def tt_random(n, d, chi, seed):
    """Train with i.i.d. standard normal cores and bonds ``min(chi, exact-rank cap)``."""
    n = check_int(n, "n", 2)
    d = check_int(d, "d", 1)
    chi = check_int(chi, "chi", 1)
    rng = np.random.default_rng(seed)
    bonds = [1] + [min(chi, b) for b in exact_rank_bounds([d] * n)] + [1]
    cores = [rng.standard_normal((bonds[j], d, bonds[j + 1])) for j in range(n)]
    return TensorTrain(cores, copy=False)


def tt_rank1(vectors):
    """Rank-1 train from per-site vectors."""
    return TensorTrain([np.asarray(v, dtype=float).reshape(1, -1, 1) for v in vectors])


def tt_normalize(tt):
    """Scale the first core so that ``tt_inner(out, out) == 1``."""
    norm = tt_norm(tt)
    if norm == 0.0:
        raise DomainError("cannot normalize a zero tensor train")
    return tt.scaled(1.0 / norm)


# -- JSON file format ---------------------------------------------------------


def _format_values(values):
    arr = np.asarray(values, dtype=float).ravel()
    if not np.all(np.isfinite(arr)):
        raise DomainError("cannot serialize non-finite core values")
    return "[" + ",".join(format(v, ".17g") for v in arr) + "]"


def tt_to_json(tt):
    """Serialize to the version-1 JSON document (row-major flat cores)."""
    head = json.dumps(
        {"version": FORMAT_VERSION, "phys_dims": list(tt.phys_dims), "bond_dims": list(tt.bond_dims)}
    )
    cores = ",\n  ".join(_format_values(c) for c in tt.cores)
    return head[:-1] + ', "cores": [\n  ' + cores + "\n]}\n"


def tt_from_json(text):
    doc = json.loads(text)
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported TT file version {doc.get('version')!r}")
    phys = [int(x) for x in doc["phys_dims"]]
    bonds = [1] + [int(x) for x in doc["bond_dims"]] + [1]
    flat = doc["cores"]
    if len(phys) != len(flat) or len(bonds) != len(phys) + 1:
        raise ShapeError("phys_dims, bond_dims and cores disagree in length")
    cores = []
    for j, values in enumerate(flat):
        shape = (bonds[j], phys[j], bonds[j + 1])
        arr = np.asarray(values, dtype=float)
        if arr.size != math.prod(shape):
            raise ShapeError(f"core {j} has {arr.size} values, expected shape {shape}")
        cores.append(arr.reshape(shape))
    return TensorTrain(cores, copy=False)


def save_tt(tt, path):
    with open(path, "w") as fh:
        fh.write(tt_to_json(tt))


def load_tt(path):
    with open(path) as fh:
        return tt_from_json(fh.read())
