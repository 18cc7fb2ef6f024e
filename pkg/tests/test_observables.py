import itertools

import numpy as np
import pytest

from ttrsi.observables import SPIN1_SZ, random_mps, z_deviation, zz_expectation, zz_from_probabilities
from ttrsi.tt import tt_hadamard_direct, tt_norm, tt_rank1, tt_to_dense


def dense_zz(psi):
    p = tt_to_dense(psi) ** 2
    n = p.ndim
    total = 0.0
    for cfg in itertools.product(range(3), repeat=n):
        s = SPIN1_SZ[list(cfg)]
        total += p[cfg] * np.sum(s[:-1] * s[1:])
    return total


def test_matches_dense_oracle():
    psi = random_mps(6, 3, 4, 2)
    want = dense_zz(psi)
    assert zz_expectation(psi) == pytest.approx(want, abs=1e-13)
    assert zz_from_probabilities(tt_hadamard_direct(psi, psi)) == pytest.approx(want, abs=1e-13)
    assert z_deviation(psi, tt_hadamard_direct(psi, psi)) <= 1e-13


def test_polarized_state():
    up = tt_rank1([np.array([1.0, 0.0, 0.0])] * 7)
    assert zz_expectation(up) == 6.0
    neel = tt_rank1([np.array([1.0, 0, 0]) if j % 2 else np.array([0, 0, 1.0]) for j in range(5)])
    assert zz_expectation(neel) == -4.0


def test_random_mps_properties():
    psi = random_mps(10, 3, 6, 0)
    assert tt_norm(psi) == pytest.approx(1.0, abs=1e-12)
    assert max(psi.bond_dims) <= 6
    flat = random_mps(10, 3, 6, 0, decay=1.0)
    assert tt_norm(flat) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        random_mps(10, 3, 6, 0, decay=1.5)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        zz_expectation(tt_rank1([np.ones(2)] * 4))
    assert zz_expectation(tt_rank1([np.array([1.0, 0.0])] * 4), sz=[0.5, -0.5]) == 0.75
