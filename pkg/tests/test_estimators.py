import numpy as np
import pytest
from sklearn.base import clone

from ttrsi.direct import direct_product
from ttrsi.estimators import DirectProduct, QTTEncoder, RSIMap, RSIProduct, TTRounder
from ttrsi.qtt import QttGrid, gaussian, qtt_from_function
from ttrsi.rsi import RsiConfig, rsi_hadamard, rsi_map
from ttrsi.tt import tt_random, tt_round


def same(a, b):
    return all(np.array_equal(x, y) for x, y in zip(a.cores, b.cores))


def test_params_and_clone():
    est = RSIProduct(chi_max=7, seed=3)
    assert est.get_params()["chi_max"] == 7
    est.set_params(oversample_p=2)
    c = clone(est)
    assert c.get_params() == est.get_params()
    assert "func" in RSIMap(func=np.abs).get_params()


def test_rsi_product_matches_functional():
    a, b = tt_random(8, 2, 3, (0, 1)), tt_random(8, 2, 3, (0, 2))
    est = RSIProduct(chi_max=6, seed=1)
    out = est.fit_transform([a, b])
    assert same(out, rsi_hadamard([a, b], RsiConfig(chi_max=6, seed=1)).output)
    assert est.config_.chi_max == 6
    assert est.report_.output is out


def test_rsi_map_matches_functional():
    a = tt_random(8, 2, 3, 4)
    out = RSIMap(func=np.square, chi_max=9).fit_transform(a)
    assert same(out, rsi_map(a, np.square, RsiConfig(chi_max=9)).output)
    with pytest.raises(TypeError):
        RSIMap().fit([a])


def test_direct_and_rounder():
    a, b = tt_random(8, 2, 3, (0, 1)), tt_random(8, 2, 3, (0, 2))
    est = DirectProduct(chi_max=5)
    assert same(est.fit_transform([a, b]), direct_product([a, b], 5).output)
    assert same(TTRounder(chi_max=2).fit_transform(a), tt_round(a, 2, 1e-14))
    with pytest.raises(ValueError):
        DirectProduct(chi_max=0).fit()
    with pytest.raises(TypeError):
        RSIProduct().transform([a, np.ones(3)])


def test_qtt_encoder():
    f = gaussian(0.4, 0.15)
    enc = QTTEncoder(n_bits=10, chi_max=8).fit()
    assert enc.grid_ == QttGrid(10)
    assert same(enc.transform(f), qtt_from_function(f, QttGrid(10), 8, 1e-14))
