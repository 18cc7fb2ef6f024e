"""Direct baseline: exact Kronecker-core product followed by TT-rounding."""
import math
import time
from dataclasses import dataclass

from .exceptions import CapacityError
from .tt import TensorTrain, kron_cores, round_cores
from .validation import check_compatible

#: Largest single Kronecker core the baseline may allocate (float64 entries).
CORE_CAP = 2**26


@dataclass
class DirectResult:
    output: object
    exact: object
    t_kron_ns: int
    t_round_ns: int

    @property
    def runtime_ns(self):
        return self.t_kron_ns + self.t_round_ns


def _check_kron_size(inputs, cap):
    biggest = max(
        math.prod(c.shape[0] for c in cs) * cs[0].shape[1] * math.prod(c.shape[2] for c in cs)
        for cs in zip(*(tt.cores for tt in inputs))
    )
    if biggest > cap:
        raise CapacityError(
            f"Kronecker core with {biggest} entries exceeds the cap of {cap} "
            f"({biggest * 8 / 2**30:.1f} GiB)"
        )


def _kron_all(inputs):
    acc = inputs[0]
    for nxt in inputs[1:]:
        acc = TensorTrain(kron_cores(acc, nxt), copy=False)
    return acc


def direct_product(inputs, chi_max, eps=1e-14, cap=CORE_CAP, keep_exact=False, fold="full"):
    """Product of two or more trains by Kronecker cores and rounding.

    With ``fold="full"`` the exact product of all inputs is formed first (bond
    dimensions multiply across every factor) and rounded once. ``"pairwise"``
    folds left to right and rounds after every pairwise product, which keeps
    the bonds at ``chi_max * chi`` between steps. ``exact`` holds the unrounded
    product when ``keep_exact`` is set (full fold only).
    """
    inputs = list(inputs)
    if len(inputs) < 2:
        raise ValueError("direct_product needs at least two inputs")
    if fold not in ("full", "pairwise"):
        raise ValueError(f"fold must be 'full' or 'pairwise', got {fold!r}")
    check_compatible(*inputs)
    if fold == "full" or len(inputs) == 2:
        _check_kron_size(inputs, cap)
        t0 = time.perf_counter_ns()
        head = _kron_all(inputs[:-1])
        cores = kron_cores(head, inputs[-1])
        del head
        t1 = time.perf_counter_ns()
        exact = TensorTrain(cores) if keep_exact else None
        out = round_cores(cores, chi_max, eps)
        del cores
        t2 = time.perf_counter_ns()
        return DirectResult(output=out, exact=exact, t_kron_ns=t1 - t0, t_round_ns=t2 - t1)
    t_kron = t_round = 0
    acc = inputs[0]
    for nxt in inputs[1:]:
        _check_kron_size([acc, nxt], cap)
        t0 = time.perf_counter_ns()
        cores = kron_cores(acc, nxt)
        t1 = time.perf_counter_ns()
        acc = round_cores(cores, chi_max, eps)
        del cores
        t2 = time.perf_counter_ns()
        t_kron += t1 - t0
        t_round += t2 - t1
    return DirectResult(output=acc, exact=None, t_kron_ns=t_kron, t_round_ns=t_round)


def _qr_flops(m, n):
    k = min(m, n)
    return 2 * m * n * k - 2 * k**3 // 3


def _svd_flops(m, n):
    big, small = max(m, n), min(m, n)
    return 4 * big * small**2 + 8 * small**3


def direct_flops(phys_dims, bonds_a, bonds_b, chi_max):
    """Operation count of :func:`direct_product` for two trains, from shapes only.

    ``bonds_*`` are the internal bond dimensions. Rank growth during the QR
    sweep follows ``min(rows, cols)``; the truncation sweep keeps at most
    ``chi_max``.
    """
    n = len(phys_dims)
    ba = [1] + list(bonds_a) + [1]
    bb = [1] + list(bonds_b) + [1]
    bonds = [x * y for x, y in zip(ba, bb)]
    total = sum(phys_dims[j] * bonds[j] * bonds[j + 1] for j in range(n))
    # right-to-left QR
    r = list(bonds)
    for j in range(n - 1, 0, -1):
        rows, cols = phys_dims[j] * r[j + 1], bonds[j]
        total += _qr_flops(rows, cols)
        new = min(rows, cols)
        total += 2 * bonds[j - 1] * phys_dims[j - 1] * bonds[j] * new
        r[j] = new
    # left-to-right truncated SVD
    left = 1
    for j in range(n - 1):
        rows, cols = left * phys_dims[j], r[j + 1]
        total += _svd_flops(rows, cols)
        keep = min(chi_max, rows, cols)
        total += 2 * keep * cols * phys_dims[j + 1] * r[j + 2]
        left = keep
    return total


def tt_bytes(tt):
    return 8 * sum(math.prod(c.shape) for c in tt.cores)
