"""Recursive Sketched Interpolation (RSI).

Builds a TT approximation of ``G = func(T_1, ..., T_m)`` (elementwise) one
core per iteration, left to right:

1. sketch the tails of every input with a shared random one-cluster basis and
   contract them with the two open cores,
2. combine the sketched tensors elementwise and take a row ID of the result;
   the interpolation matrix becomes the next output core,
3. slice every input at the selected pivot rows (re-interpolation) so the next
   iteration works in the pivot basis of the output.

Once the remaining tail is no larger than the sketch dimension the rest of
the product is formed exactly and split by successive IDs; the skeleton of
the last ID becomes the final core. Cost is cubic in the bond dimension.
"""
import math
import time
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .exceptions import DegenerateSketchError, DomainError
from .interpolative import prrlu_row_id
from .sketching import FIRST_SKETCHED_SITE, make_omegas, make_sketch_bundle, sketch_flops
from .tt import TensorTrain, tt_eval_many, tt_norm
from .validation import check_compatible, check_int, check_real

RESEED_STRIDE = 104729


@dataclass(frozen=True)
class RsiConfig:
    """Parameters of one RSI run.

    The sketch dimension is ``ceil(chi_max / d) + oversample_p`` with ``d`` the
    largest physical dimension.
    """

    chi_max: int
    eps_id: float = 1e-14
    oversample_p: int = 0
    seed: int = 0
    skip_sketch_auto: bool = True
    share_omegas: bool = True
    max_reseeds: int = 2
    verify_samples: int = 64
    verify_tol: float = None

    def __post_init__(self):
        check_int(self.chi_max, "chi_max", 1)
        check_real(self.eps_id, "eps_id", 0.0)
        check_int(self.oversample_p, "oversample_p", 0)
        check_int(self.seed, "seed")
        check_int(self.max_reseeds, "max_reseeds", 0)
        check_int(self.verify_samples, "verify_samples", 0)
        if self.verify_tol is not None:
            check_real(self.verify_tol, "verify_tol", 0.0)

    def sketch_dim(self, phys_dims):
        return -(-self.chi_max // max(phys_dims)) + self.oversample_p

    def verification_tolerance(self):
        if self.verify_tol is not None:
            return self.verify_tol
        return max(1e-9, 1e4 * self.eps_id)


@dataclass
class PivotTrail:
    """Pivot sets of every iteration.

    ``rows[j]`` are flat row indices into iteration ``j``'s matricization
    (left-bond major, then ``s_j``); ``multi[j]`` resolves them to prefixes
    ``(s_0, ..., s_j)``, one per row.
    """

    rows: list = field(default_factory=list)
    multi: list = field(default_factory=list)

    def append(self, rows, phys_dim):
        prev = self.multi[-1] if self.multi else np.zeros((1, 0), dtype=np.intp)
        left, s = np.divmod(np.asarray(rows, dtype=np.intp), phys_dim)
        self.rows.append(np.asarray(rows, dtype=np.intp))
        self.multi.append(np.column_stack([prev[left], s]).astype(np.intp))

    @property
    def sizes(self):
        return [len(r) for r in self.rows]

    def is_nested(self):
        """Every prefix in set ``j`` extends a prefix in set ``j - 1``."""
        for prev, cur in zip(self.multi, self.multi[1:]):
            known = {tuple(p) for p in prev}
            if any(tuple(p[:-1]) not in known for p in cur):
                return False
        return True


@dataclass
class RsiReport:
    output: TensorTrain
    trail: PivotTrail
    local_errors: list
    ranks: list
    sketched: list
    converged: list
    k: int
    seed: int
    attempts: int
    t_sketch_ns: int
    t_iter_ns: int
    flops: int
    max_bond_seen: int

    @property
    def runtime_ns(self):
        return self.t_sketch_ns + self.t_iter_ns


class _Degenerate(Exception):
    def __init__(self, iteration, reason):
        super().__init__(reason)
        self.iteration = iteration
        self.reason = reason


def _product(*arrays):
    return reduce(np.multiply, arrays)


def _combine(func, arrays, where):
    out = np.asarray(func(*arrays), dtype=np.float64)
    if out.shape != arrays[0].shape:
        raise DomainError(f"elementwise map changed the shape {arrays[0].shape} -> {out.shape}")
    bad = ~np.isfinite(out)
    if bad.any():
        idx = tuple(int(i) for i in np.unravel_index(np.argmax(bad), out.shape))
        raise DomainError(f"non-finite value {out[idx]} from the elementwise map at {where} index {idx}")
    return out


def rsi_iteration(heads, next_cores, sketch_mats, func, chi_max, eps_id):
    """One sketched RSI step.

    Parameters
    ----------
    heads : list of ndarray
        Re-interpolated core ``j`` of every input, shape ``(chi^G_{j-1}, d_j, chi_j)``.
    next_cores : list of ndarray
        Core ``j + 1`` of every input.
    sketch_mats : list of ndarray
        Sketch of sites ``j + 2 .. n - 1`` per input, shape ``(chi_{j+1}, k)``.
    func : callable
        Elementwise combination of the sketched tensors.

    Returns
    -------
    core : ndarray, shape ``(chi^G_{j-1}, d_j, rank)``
    factor : InterpolativeFactor
    new_heads : list of ndarray
        Inputs' core ``j + 1`` re-interpolated at the pivot rows.
    """
    left, d, _ = heads[0].shape
    d_next = next_cores[0].shape[1]
    sketched = []
    for h, a, s in zip(heads, next_cores, sketch_mats):
        r = a.shape[0]
        b = np.tensordot(a, s, axes=(2, 0))  # (chi_j, d_{j+1}, k)
        sketched.append(h.reshape(left * d, h.shape[2]) @ b.reshape(r, -1))
    g = _combine(func, sketched, "sketched (row, column)")
    factor = prrlu_row_id(g, chi_max, eps_id)
    core = factor.x.reshape(left, d, factor.rank)
    new_heads = [
        (h.reshape(left * d, h.shape[2])[factor.pivots] @ a.reshape(a.shape[0], -1)).reshape(
            factor.rank, d_next, a.shape[2]
        )
        for h, a in zip(heads, next_cores)
    ]
    return core, factor, new_heads


def _iteration_flops(heads, next_cores, k, rank, n_inputs):
    left, d, _ = heads[0].shape
    total = 0
    for h, a in zip(heads, next_cores):
        r, dn, r2 = a.shape
        total += 2 * r * dn * r2 * k + 2 * left * d * r * dn * k + 2 * rank * r * dn * r2
    rows, cols = left * d, next_cores[0].shape[1] * k
    return total + n_inputs * rows * cols + _id_flops(rows, cols, rank)


def _id_flops(rows, cols, rank):
    return 4 * (rank + 1) * rows * cols + rank * rank * rows


def _zero_train(dims):
    return TensorTrain([np.zeros((1, d, 1)) for d in dims], copy=False)


def _check_zero_input(inputs, func):
    if func is _product and any(tt_norm(tt) == 0.0 for tt in inputs):
        return True
    return False


def _run(inputs, func, cfg, seed):
    dims = inputs[0].phys_dims
    n = len(dims)
    k = cfg.sketch_dim(dims)
    flops = 0

    switch = n - 2
    if cfg.skip_sketch_auto:
        for j in range(n - 1):
            if math.prod(dims[j + 2 :]) <= k:
                switch = j
                break

    t0 = time.perf_counter_ns()
    bundles = []
    if switch > 0:
        if cfg.share_omegas:
            omegas = make_omegas(dims, k, seed)
            bundles = [make_sketch_bundle(tt, omegas, k) for tt in inputs]
        else:
            bundles = [make_sketch_bundle(tt, make_omegas(dims, k, (seed, i + 1)), k) for i, tt in enumerate(inputs)]
        flops += sum(sketch_flops(tt, k) for tt in inputs)
    t1 = time.perf_counter_ns()

    trail = PivotTrail()
    cores, local_errors, ranks, sketched, converged = [], [], [], [], []
    heads = [tt.cores[0] for tt in inputs]
    max_bond = max(max(tt.bond_dims) for tt in inputs)
    for j in range(switch):
        nxt = [tt.cores[j + 1] for tt in inputs]
        smats = [b.sketch(j + FIRST_SKETCHED_SITE) for b in bundles]
        core, factor, new_heads = rsi_iteration(heads, nxt, smats, func, cfg.chi_max, cfg.eps_id)
        flops += _iteration_flops(heads, nxt, k, factor.rank, len(inputs))
        if factor.rank == 0:
            if _check_zero_input(inputs, func):
                return _zero_report(inputs, k, seed, t1 - t0, time.perf_counter_ns() - t1)
            raise _Degenerate(j, "sketched product is identically zero")
        heads = new_heads
        cores.append(core)
        trail.append(factor.pivots, dims[j])
        local_errors.append(factor.local_error)
        ranks.append(factor.rank)
        sketched.append(True)
        # filling every sketch column is a sketch limit, not convergence
        converged.append(factor.converged and factor.rank < factor.shape[1])
        max_bond = max(max_bond, factor.rank)

    # exact tail: contract the re-interpolated heads with all remaining cores
    tails = []
    for tt, h in zip(inputs, heads):
        t = h
        for core in tt.cores[switch + 1 :]:
            flops += 2 * t.size * core.shape[1] * core.shape[2]
            t = np.tensordot(t, core, axes=(t.ndim - 1, 0))
        tails.append(t.reshape(t.shape[:-1]))
    g = _combine(func, tails, "exact tail")
    flops += len(inputs) * g.size
    for j in range(switch, n - 1):
        left = g.shape[0]
        mat = g.reshape(left * dims[j], -1)
        factor = prrlu_row_id(mat, cfg.chi_max, cfg.eps_id)
        flops += _id_flops(mat.shape[0], mat.shape[1], factor.rank)
        if factor.rank == 0:
            return _zero_report(inputs, k, seed, t1 - t0, time.perf_counter_ns() - t1)
        cores.append(factor.x.reshape(left, dims[j], factor.rank))
        trail.append(factor.pivots, dims[j])
        local_errors.append(factor.local_error)
        ranks.append(factor.rank)
        sketched.append(False)
        converged.append(factor.converged)
        max_bond = max(max_bond, factor.rank)
        g = factor.skeleton.reshape((factor.rank,) + g.shape[2:])
    cores.append(g.reshape(g.shape[0], dims[-1], 1))
    output = TensorTrain(cores, copy=False)
    t2 = time.perf_counter_ns()

    if cfg.verify_samples and all(converged):
        _verify(output, inputs, func, cfg, seed)

    return RsiReport(
        output=output,
        trail=trail,
        local_errors=local_errors,
        ranks=ranks,
        sketched=sketched,
        converged=converged,
        k=k,
        seed=seed,
        attempts=1,
        t_sketch_ns=t1 - t0,
        t_iter_ns=t2 - t1,
        flops=flops,
        max_bond_seen=max_bond,
    )


def _zero_report(inputs, k, seed, t_sketch, t_iter):
    dims = inputs[0].phys_dims
    return RsiReport(
        output=_zero_train(dims),
        trail=PivotTrail(),
        local_errors=[],
        ranks=[],
        sketched=[],
        converged=[],
        k=k,
        seed=seed,
        attempts=1,
        t_sketch_ns=t_sketch,
        t_iter_ns=t_iter,
        flops=0,
        max_bond_seen=1,
    )


def _verify(output, inputs, func, cfg, seed):
    """Spot-check a run whose IDs all met the tolerance.

    A sketch that missed part of the range still lets every ID converge, so
    the output is compared with exact values at random multi-indices.
    """
    dims = output.phys_dims
    rng = np.random.default_rng((seed, 0x5EED))
    idx = np.column_stack([rng.integers(0, d, cfg.verify_samples) for d in dims])
    exact = _combine(func, [tt_eval_many(tt, idx) for tt in inputs], "verification sample")
    approx = tt_eval_many(output, idx)
    rms_out = tt_norm(output) / math.sqrt(math.prod(dims))
    scale = max(rms_out, float(np.sqrt(np.mean(exact**2))))
    if scale == 0.0:
        return
    err = float(np.sqrt(np.mean((approx - exact) ** 2))) / scale
    if err > cfg.verification_tolerance():
        raise _Degenerate(None, f"sampled relative error {err:.3e} after all IDs converged")


def rsi_apply(inputs, func, cfg):
    """RSI for an arbitrary elementwise function of one or more trains.

    ``func(*arrays)`` must act entrywise on equally shaped arrays. A run whose
    sketch proves degenerate is repeated with a new seed up to
    ``cfg.max_reseeds`` times before :class:`DegenerateSketchError` is raised.
    """
    inputs = list(inputs)
    check_compatible(*inputs)
    failures = []
    for attempt in range(cfg.max_reseeds + 1):
        seed = cfg.seed + attempt * RESEED_STRIDE
        try:
            report = _run(inputs, func, cfg, seed)
        except _Degenerate as exc:
            failures.append((seed, exc))
            continue
        report.attempts = attempt + 1
        return report
    last = failures[-1][1]
    where = "final check" if last.iteration is None else f"iteration {last.iteration}"
    raise DegenerateSketchError(
        f"degenerate sketch at {where} ({last.reason}) for seeds {[s for s, _ in failures]}",
        iteration=last.iteration,
        seeds=[s for s, _ in failures],
    )


def rsi_hadamard(inputs, cfg):
    """Elementwise product of two or more trains."""
    inputs = list(inputs)
    if len(inputs) < 2:
        raise ValueError("rsi_hadamard needs at least two inputs")
    return rsi_apply(inputs, _product, cfg)


def rsi_map(tt, f, cfg):
    """Elementwise nonlinear map ``f(T)`` of a single train."""
    return rsi_apply([tt], f, cfg)
