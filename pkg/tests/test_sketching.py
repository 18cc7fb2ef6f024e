import itertools

import numpy as np
import pytest

from ttrsi.exceptions import ShapeError
from ttrsi.interpolative import prrlu_row_id
from ttrsi.sketching import make_omegas, make_sketch_bundle, sketch_flops
from ttrsi.tt import TensorTrain, tt_eval, tt_random, tt_to_dense


def test_omegas_deterministic_and_shaped():
    a = make_omegas([2] * 5, 7, 3)
    b = make_omegas([2] * 5, 7, 3)
    assert [o.shape for o in a] == [(7, 2)] * 3
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    c = make_omegas([2] * 5, 7, 4)
    assert not np.array_equal(a[0], c[0])


def test_omegas_nested_in_k():
    small = make_omegas([3] * 6, 4, 9)
    big = make_omegas([3] * 6, 10, 9)
    assert all(np.array_equal(s, b[:4]) for s, b in zip(small, big))


def test_omegas_standard_normal():
    om = make_omegas([100] * 3, 100, 0)[0]
    assert om.size == 10**4
    assert abs(om.mean()) < 0.05
    assert abs(om.var() - 1.0) < 0.1


def test_shape_mismatch():
    tt = tt_random(5, 2, 3, 0)
    with pytest.raises(ShapeError):
        make_sketch_bundle(tt, make_omegas([2] * 4, 3, 0), 3)
    with pytest.raises(ShapeError):
        make_sketch_bundle(tt, make_omegas([3] * 5, 3, 0), 3)


def test_all_ones_omega_gives_tail_sums():
    tt = tt_random(6, 3, 4, 2)
    oms = [np.ones((1, 3)) for _ in range(4)]
    b = make_sketch_bundle(tt, oms, 1)
    dense = tt_to_dense(tt)
    # S_2[alpha] = sum over sites 2..5 of the tail contraction
    tail = tt.cores[2]
    for core in tt.cores[3:]:
        tail = np.tensordot(tail, core, axes=(tail.ndim - 1, 0))
    want = tail.reshape(tail.shape[0], -1).sum(axis=1)
    assert np.allclose(b.raw_sketch(2)[:, 0], want, rtol=1e-12, atol=0)
    # and through the head: sum of the dense tensor over the tail
    head = np.tensordot(tt.cores[0], tt.cores[1], axes=(2, 0)).reshape(9, -1)
    assert np.allclose(head @ b.raw_sketch(2)[:, 0], dense.reshape(9, -1).sum(axis=1), rtol=1e-12)


def test_one_hot_omega_gives_exact_fibers():
    tt = tt_random(6, 2, 3, 4)
    tails = [(0, 1, 1, 0), (1, 1, 0, 1), (0, 0, 0, 1)]
    oms = []
    for site in range(4):
        om = np.zeros((len(tails), 2))
        for kappa, t in enumerate(tails):
            om[kappa, t[site]] = 1.0
        oms.append(om)
    b = make_sketch_bundle(tt, oms, len(tails))
    head = np.tensordot(tt.cores[0], tt.cores[1], axes=(2, 0)).reshape(4, -1)
    fibers = head @ b.raw_sketch(2)
    for kappa, t in enumerate(tails):
        for r, (s0, s1) in enumerate(itertools.product(range(2), repeat=2)):
            assert fibers[r, kappa] == pytest.approx(tt_eval(tt, (s0, s1) + t), rel=1e-12)


def test_recursion_matches_per_column_chain():
    tt = tt_random(7, 3, 5, 1)
    k = 6
    b = make_sketch_bundle(tt, make_omegas(tt.phys_dims, k, 8), k)
    for site in range(2, 7):
        raw = b.raw_sketch(site)
        for kappa in range(k):
            vec = np.ones(1)
            for core in reversed(b.sketched_cores[site - 2:]):
                vec = core[:, kappa, :] @ vec
            assert np.allclose(raw[:, kappa], vec, rtol=1e-12, atol=1e-12 * np.abs(vec).max())
    last = b.sketched_cores[-1]
    assert np.allclose(b.raw_sketch(6), last[:, :, 0])


def test_stored_columns_are_unit_norm():
    tt = tt_random(12, 2, 6, 3)
    b = make_sketch_bundle(tt, make_omegas(tt.phys_dims, 4, 0), 4)
    for mat in b.sketch_mats:
        assert np.allclose(np.linalg.norm(mat, axis=0), 1.0)


def test_deterministic_bundle():
    tt = tt_random(6, 2, 3, 3)
    a = make_sketch_bundle(tt, make_omegas(tt.phys_dims, 3, 1), 3)
    b = make_sketch_bundle(tt, make_omegas(tt.phys_dims, 3, 1), 3)
    assert all(np.array_equal(x, y) for x, y in zip(a.sketch_mats, b.sketch_mats))


def test_column_space_captured():
    # site-2 unfolding of rank r <= k - 2 keeps its rank after sketching
    n, d, k = 7, 2, 6
    failures = 0
    for seed in range(20):
        tt = tt_random(n, d, 4, seed)
        dense = tt_to_dense(tt).reshape(d * d, -1)
        r = np.linalg.matrix_rank(dense)
        assert r <= k - 2
        b = make_sketch_bundle(tt, make_omegas(tt.phys_dims, k, seed), k)
        head = np.tensordot(tt.cores[0], tt.cores[1], axes=(2, 0)).reshape(d * d, -1)
        sketched = head @ b.sketch(2)
        failures += prrlu_row_id(sketched, 64, 1e-12).rank < r
    assert failures == 0


def test_flops_positive():
    tt = tt_random(8, 2, 4, 0)
    assert sketch_flops(tt, 3) > 0
    assert sketch_flops(tt, 6) == 2 * sketch_flops(tt, 3)


def test_non_uniform_dims():
    cores = [np.ones((1, 2, 2)), np.ones((2, 3, 2)), np.ones((2, 4, 2)), np.ones((2, 5, 1))]
    tt = TensorTrain(cores)
    oms = make_omegas(tt.phys_dims, 3, 0)
    assert [o.shape for o in oms] == [(3, 4), (3, 5)]
    make_sketch_bundle(tt, oms, 3)
