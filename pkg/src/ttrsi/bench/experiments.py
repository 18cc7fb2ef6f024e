"""Desk-scale accuracy and runtime experiments.

Every experiment expands its parameters into independent points, runs them
(sequentially by default, in worker processes with ``parallel=True``) and
returns a flat list of :class:`ExperimentRecord`. Runtimes are medians over
``repeats`` runs per phase; errors come from the last run, which is
deterministic for a fixed seed.
"""
import os
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache

import numpy as np

from ..direct import direct_product
from ..exceptions import CapacityError
from ..observables import random_mps, z_deviation
from ..qtt import QttGrid, gaussian, make_function, qtt_from_function, relu, sample_grid
from ..rsi import RsiConfig, rsi_apply, rsi_hadamard
from ..tt import relative_error, tt_from_dense, tt_hadamard_direct, tt_random
from .records import ExperimentRecord

QTT_EPS = 1e-14
SPIKE = {"mu1": 0.49, "mu2": 0.51, "sigma": 0.01}
MULTIPRODUCTS = {
    "f1f2": (1, 1),
    "f1f2^2": (1, 2),
    "f1^2f2^2": (2, 2),
}


# -- helpers ------------------------------------------------------------------


def _median_ns(values):
    return int(np.median(values))


def timed_rsi(inputs, cfg, func=None, repeats=1):
    """RSI run plus median phase timings over ``repeats`` runs.

    ``func=None`` means the elementwise product of the inputs.
    """
    sketch, iters = [], []
    for _ in range(repeats):
        rep = rsi_hadamard(inputs, cfg) if func is None else rsi_apply(inputs, func, cfg)
        sketch.append(rep.t_sketch_ns)
        iters.append(rep.t_iter_ns)
    return rep, _median_ns(sketch), _median_ns(iters)


def timed_direct(inputs, chi_max, repeats=1, fold="full", eps=1e-14):
    kron, rnd = [], []
    for _ in range(repeats):
        res = direct_product(inputs, chi_max, eps, fold=fold)
        kron.append(res.t_kron_ns)
        rnd.append(res.t_round_ns)
    return res, _median_ns(kron), _median_ns(rnd)


def loglog_slope(xs, ys):
    """Least-squares slope of ``log y`` against ``log x``."""
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    if xs.size < 2:
        raise ValueError("a slope needs at least two points")
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def _execute(tasks, parallel):
    if not parallel:
        return [rec for fn, kw in tasks for rec in fn(**kw)]
    workers = parallel if isinstance(parallel, int) and not isinstance(parallel, bool) else os.cpu_count()
    with ProcessPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [pool.submit(fn, **kw) for fn, kw in tasks]
        out = [rec for fut in futures for rec in fut.result()]
    for rec in out:
        rec.timing_trusted = False
    return out


def _rsi_record(experiment, inputs, chi_in, chi_out, cfg, rep, t_sketch, t_iter, **extra):
    return ExperimentRecord(
        experiment=experiment, method="rsi", n=inputs[0].n_sites, d=max(inputs[0].phys_dims),
        chi_in=chi_in, chi_out=chi_out, k=rep.k, p=cfg.oversample_p, eps_id=cfg.eps_id,
        seed=cfg.seed, t_sketch_ns=t_sketch, t_iter_ns=t_iter, **extra,
    )


def _direct_record(experiment, inputs, chi_in, chi_out, t_kron, t_round, **extra):
    return ExperimentRecord(
        experiment=experiment, method="direct", n=inputs[0].n_sites, d=max(inputs[0].phys_dims),
        chi_in=chi_in, chi_out=chi_out, t_kron_ns=t_kron, t_round_ns=t_round, **extra,
    )


# -- inputs (cached per process) ----------------------------------------------


@lru_cache(maxsize=32)
def gaussian_qtt(mu, sigma, n_bits, chi_in):
    return qtt_from_function(gaussian(mu, sigma), QttGrid(n_bits), chi_in, QTT_EPS)


@lru_cache(maxsize=8)
def catalog_qtt(name, n_bits, chi_in):
    return qtt_from_function(make_function(name), QttGrid(n_bits), chi_in, QTT_EPS)


@lru_cache(maxsize=8)
def _exact_product(a, b):
    return tt_hadamard_direct(a, b)


# -- |psi|^2 --------------------------------------------------------------------


def _psi2_point(n, d, chi_in, chi_out, seeds, psi_seed, eps_id, p, decay, repeats):
    psi = random_mps(n, d, chi_in, psi_seed, decay)
    truth = tt_hadamard_direct(psi, psi)
    name = "psi2"
    recs = []
    for seed in seeds:
        cfg = RsiConfig(chi_max=chi_out, eps_id=eps_id, oversample_p=p, seed=seed)
        rep, ts, ti = timed_rsi([psi, psi], cfg, repeats=repeats)
        recs.append(_rsi_record(
            name, [psi], chi_in, chi_out, cfg, rep, ts, ti,
            rel_error=relative_error(rep.output, truth), z_dev=z_deviation(psi, rep.output),
        ))
    res, tk, tr = timed_direct([psi, psi], chi_out, repeats)
    recs.append(_direct_record(
        name, [psi], chi_in, chi_out, tk, tr, seed=psi_seed,
        rel_error=relative_error(res.output, truth), z_dev=z_deviation(psi, res.output),
    ))
    return recs


def exp_psi_squared(n=20, chi_list=(10,), chi_out_list=(2, 4, 6, 8, 10, 100), seeds=range(5),
                    psi_seed=0, d=3, eps_id=1e-14, p=0, decay=0.5, repeats=1, parallel=False):
    """|psi|^2 of a random spin-1 MPS by RSI and by direct+rounding, with Z deviations.

    The direct record carries ``psi_seed`` in its seed column since it uses no
    sketch.
    """
    if d != 3:
        raise ValueError("the S^z S^z observable is defined for spin 1 (d = 3)")
    tasks = [
        (_psi2_point, dict(n=n, d=d, chi_in=chi_in, chi_out=chi_out, seeds=tuple(seeds),
                           psi_seed=psi_seed, eps_id=eps_id, p=p, decay=decay, repeats=repeats))
        for chi_in in chi_list for chi_out in chi_out_list
    ]
    return _execute(tasks, parallel)


# -- Gaussian QTTs ------------------------------------------------------------------


def _gaussian_point(name, mu1, mu2, sigma, n_bits, chi_in, chi_out, seeds, eps_id, p, repeats):
    f1 = gaussian_qtt(mu1, sigma, n_bits, chi_in)
    f2 = gaussian_qtt(mu2, sigma, n_bits, chi_in)
    truth = _exact_product(f1, f2)
    chi = max(f1.max_bond, f2.max_bond)
    recs = []
    for seed in seeds:
        cfg = RsiConfig(chi_max=chi_out, eps_id=eps_id, oversample_p=p, seed=seed)
        rep, ts, ti = timed_rsi([f1, f2], cfg, repeats=repeats)
        recs.append(_rsi_record(name, [f1], chi, chi_out, cfg, rep, ts, ti,
                                rel_error=relative_error(rep.output, truth)))
    res, tk, tr = timed_direct([f1, f2], chi_out, repeats)
    recs.append(_direct_record(name, [f1], chi, chi_out, tk, tr, rel_error=relative_error(res.output, truth)))
    return recs


def _multiproduct_point(label, powers, mu1, mu2, sigma, n_bits, chi_in, chi_out, seeds, eps_id, p,
                        repeats, fold):
    f1 = gaussian_qtt(mu1, sigma, n_bits, chi_in)
    f2 = gaussian_qtt(mu2, sigma, n_bits, chi_in)
    inputs = [f1] * powers[0] + [f2] * powers[1]
    g1, g2 = gaussian(mu1, sigma), gaussian(mu2, sigma)
    dense = sample_grid(lambda x: g1(x) ** powers[0] * g2(x) ** powers[1], QttGrid(n_bits))
    truth = tt_from_dense(dense, 2**n_bits, 1e-15)
    chi = max(f1.max_bond, f2.max_bond)
    name = f"gaussian-multiproduct-{label}"
    recs = []
    for seed in seeds:
        cfg = RsiConfig(chi_max=chi_out, eps_id=eps_id, oversample_p=p, seed=seed)
        rep, ts, ti = timed_rsi(inputs, cfg, repeats=repeats)
        recs.append(_rsi_record(name, inputs, chi, chi_out, cfg, rep, ts, ti,
                                rel_error=relative_error(rep.output, truth)))
    try:
        res, tk, tr = timed_direct(inputs, chi_out, repeats, fold=fold)
        recs.append(_direct_record(name, inputs, chi, chi_out, tk, tr,
                                   rel_error=relative_error(res.output, truth)))
    except CapacityError:
        # no timings or error: the exact product does not fit
        recs.append(_direct_record(name, inputs, chi, chi_out, None, None))
    return recs


def exp_gaussian(variant="separation", mu1=0.4, mu2=0.6, sigma=0.15, chi_out_list=(4, 6, 8, 10, 12, 14),
                 seeds=range(5), n_bits=20, chi_in=10, eps_id=1e-14, p=0, repeats=1, fold="full",
                 parallel=False):
    """Products of Gaussian QTTs.

    ``separation`` uses the given means, ``spike`` overrides them with two
    narrow peaks, ``multiproduct`` times ``f1 f2``, ``f1 f2^2`` and
    ``f1^2 f2^2`` at every ``chi_out`` (15 is the usual choice) with errors
    measured against a TT-SVD of the sampled product.
    """
    if variant == "spike":
        mu1, mu2, sigma = SPIKE["mu1"], SPIKE["mu2"], SPIKE["sigma"]
    if variant in ("separation", "spike"):
        tasks = [
            (_gaussian_point, dict(name=f"gaussian-{variant}", mu1=mu1, mu2=mu2, sigma=sigma, n_bits=n_bits,
                                   chi_in=chi_in, chi_out=c, seeds=tuple(seeds), eps_id=eps_id, p=p,
                                   repeats=repeats))
            for c in chi_out_list
        ]
    elif variant == "multiproduct":
        tasks = [
            (_multiproduct_point, dict(label=label, powers=powers, mu1=mu1, mu2=mu2, sigma=sigma,
                                       n_bits=n_bits, chi_in=chi_in, chi_out=c, seeds=tuple(seeds),
                                       eps_id=eps_id, p=p, repeats=repeats, fold=fold))
            for c in chi_out_list for label, powers in MULTIPRODUCTS.items()
        ]
    else:
        raise ValueError(f"unknown gaussian variant {variant!r}")
    return _execute(tasks, parallel)


# -- oscillatory -------------------------------------------------------------------


def _oscillatory_point(n_bits, chi_in, chi_out, p_list, seeds, eps_id, repeats):
    a = catalog_qtt("osc1", n_bits, chi_in)
    b = catalog_qtt("osc2", n_bits, chi_in)
    truth = _exact_product(a, b)
    chi = max(a.max_bond, b.max_bond)
    recs = []
    for p in p_list:
        for seed in seeds:
            cfg = RsiConfig(chi_max=chi_out, eps_id=eps_id, oversample_p=p, seed=seed)
            rep, ts, ti = timed_rsi([a, b], cfg, repeats=repeats)
            recs.append(_rsi_record("oscillatory", [a], chi, chi_out, cfg, rep, ts, ti,
                                    rel_error=relative_error(rep.output, truth)))
    res, tk, tr = timed_direct([a, b], chi_out, repeats)
    recs.append(_direct_record("oscillatory", [a], chi, chi_out, tk, tr, rel_error=relative_error(res.output, truth)))
    return recs


def exp_oscillatory(chi_out_list=tuple(range(4, 44, 4)), p_list=(0, 5, 10), seeds=range(5), n_bits=20,
                    chi_in=10, eps_id=1e-14, repeats=1, parallel=False):
    """Product of the two oscillatory catalog functions, RSI at several oversamplings."""
    tasks = [
        (_oscillatory_point, dict(n_bits=n_bits, chi_in=chi_in, chi_out=c, p_list=tuple(p_list),
                                  seeds=tuple(seeds), eps_id=eps_id, repeats=repeats))
        for c in chi_out_list
    ]
    return _execute(tasks, parallel)


# -- scaling ---------------------------------------------------------------------


def _scaling_point(n, d, chi, seed, eps_id, repeats, direct_repeats, error_max_bond):
    a = tt_random(n, d, chi, (seed, 1))
    b = tt_random(n, d, chi, (seed, 2))
    truth = tt_hadamard_direct(a, b) if chi * chi <= error_max_bond else None
    cfg = RsiConfig(chi_max=chi, eps_id=eps_id, seed=seed)
    rep, ts, ti = timed_rsi([a, b], cfg, repeats=repeats)
    err = relative_error(rep.output, truth) if truth is not None else None
    recs = [_rsi_record("scaling", [a], chi, chi, cfg, rep, ts, ti, rel_error=err)]
    try:
        res, tk, tr = timed_direct([a, b], chi, direct_repeats)
        err = relative_error(res.output, truth) if truth is not None else None
        recs.append(_direct_record("scaling", [a], chi, chi, tk, tr, seed=seed, rel_error=err))
    except CapacityError:
        recs.append(_direct_record("scaling", [a], chi, chi, None, None, seed=seed))
    return recs


def exp_scaling(chi_list=(16, 32, 64, 128), n=20, d=2, seeds=range(1), eps_id=1e-14, repeats=5,
                direct_repeats=None, error_max_bond=1024, parallel=False):
    """Runtime of RSI against direct+rounding for random pairs with ``chi_out = chi``.

    Relative errors are only computed while the exact product has bond
    dimension at most ``error_max_bond``. A direct run whose Kronecker cores
    exceed the capacity guard is recorded without timings.
    """
    direct_repeats = repeats if direct_repeats is None else direct_repeats
    tasks = [
        (_scaling_point, dict(n=n, d=d, chi=chi, seed=seed, eps_id=eps_id, repeats=repeats,
                              direct_repeats=direct_repeats, error_max_bond=error_max_bond))
        for chi in chi_list for seed in seeds
    ]
    return _execute(tasks, parallel)


def scaling_slopes(records):
    """Fitted log-log slope of median runtime against ``chi_in`` per method.

    Only points where the method produced a timing enter the fit; the chi
    values used are returned alongside each slope.
    """
    out = {}
    for method in ("rsi", "direct"):
        by_chi = {}
        for r in records:
            if r.method == method and r.runtime_ns is not None:
                by_chi.setdefault(r.chi_in, []).append(r.runtime_ns)
        chis = sorted(by_chi)
        if len(chis) >= 2:
            out[method] = (loglog_slope(chis, [np.median(by_chi[c]) for c in chis]), chis)
    return out


# -- ReLU ---------------------------------------------------------------------------


def _relu_point(n_bits, chi_out, seeds, eps_id, p, params, repeats):
    f = make_function("relu_target", params)
    grid = QttGrid(n_bits)
    tt = qtt_from_function(f, grid, 64, QTT_EPS)
    dense = relu(sample_grid(f, grid))
    norm = float(np.linalg.norm(dense))
    recs = []
    for seed in seeds:
        cfg = RsiConfig(chi_max=chi_out, eps_id=eps_id, oversample_p=p, seed=seed)
        rep, ts, ti = timed_rsi([tt], cfg, relu, repeats)
        diff = float(np.linalg.norm(rep.output.to_dense() - dense))
        # an all-negative input maps to zero: report the absolute error
        err = diff / norm if norm > 0 else diff
        recs.append(_rsi_record("relu", [tt], tt.max_bond, chi_out, cfg, rep, ts, ti, rel_error=err))
    return recs


def exp_relu(chi_out_list=(5, 10, 15, 20, 25, 30, 35, 40), seeds=range(5), n_bits=14, eps_id=1e-14, p=0,
             params=None, repeats=1, parallel=False):
    """ReLU of the catalog's sign-changing target, checked against dense samples."""
    params = dict(params or {})
    tasks = [
        (_relu_point, dict(n_bits=n_bits, chi_out=c, seeds=tuple(seeds), eps_id=eps_id, p=p, params=params,
                           repeats=repeats))
        for c in chi_out_list
    ]
    return _execute(tasks, parallel)


# -- summaries ---------------------------------------------------------------------


def median_by(records, key, value="rel_error", method=None):
    """Median of ``value`` grouped by ``key(record)``; records with no value are skipped."""
    groups = {}
    for r in records:
        v = getattr(r, value)
        if v is None or (method is not None and r.method != method):
            continue
        groups.setdefault(key(r), []).append(v)
    return {k: float(np.median(v)) for k, v in sorted(groups.items())}


def count_inversions(values, slack=0.0):
    """Number of steps where a sequence rises by more than ``slack``."""
    return sum(1 for a, b in zip(values, values[1:]) if b > a + slack)


def rsi_product(a, b, cfg):
    """RSI product of two trains (the ``product`` command)."""
    return rsi_hadamard([a, b], cfg)


__all__ = [
    "exp_psi_squared", "exp_gaussian", "exp_oscillatory", "exp_scaling", "exp_relu",
    "scaling_slopes", "loglog_slope", "median_by", "count_inversions", "timed_rsi", "timed_direct",
    "rsi_product",
]
