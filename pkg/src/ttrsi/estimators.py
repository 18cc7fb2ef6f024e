"""scikit-learn style wrappers around the functional API.

There is nothing to learn from data here, so ``fit`` only validates the
hyperparameters; ``transform`` takes a sequence of tensor trains and returns
the resulting train. Diagnostics of the last call land in attributes with a
trailing underscore, as scikit-learn does for fitted state.
"""
from sklearn.base import BaseEstimator, TransformerMixin

from .direct import direct_product
from .qtt import QttGrid, qtt_from_function
from .rsi import RsiConfig, rsi_apply, rsi_hadamard
from .tt import TensorTrain, tt_round
from .validation import check_int, check_real


def _as_trains(X):
    if isinstance(X, TensorTrain):
        return [X]
    trains = list(X)
    for tt in trains:
        if not isinstance(tt, TensorTrain):
            raise TypeError(f"expected TensorTrain inputs, got {type(tt).__name__}")
    return trains


class _RsiParams(BaseEstimator, TransformerMixin):
    def __init__(self, chi_max=16, eps_id=1e-14, oversample_p=0, seed=0,
                 skip_sketch_auto=True, share_omegas=True, max_reseeds=2):
        self.chi_max = chi_max
        self.eps_id = eps_id
        self.oversample_p = oversample_p
        self.seed = seed
        self.skip_sketch_auto = skip_sketch_auto
        self.share_omegas = share_omegas
        self.max_reseeds = max_reseeds

    def _config(self):
        return RsiConfig(
            chi_max=self.chi_max,
            eps_id=self.eps_id,
            oversample_p=self.oversample_p,
            seed=self.seed,
            skip_sketch_auto=self.skip_sketch_auto,
            share_omegas=self.share_omegas,
            max_reseeds=self.max_reseeds,
        )

    def fit(self, X=None, y=None):
        self.config_ = self._config()
        return self


class RSIProduct(_RsiParams):
    """Elementwise product of the trains in ``X`` by RSI.

    >>> est = RSIProduct(chi_max=9)
    >>> g = est.fit_transform([a, b])          # doctest: +SKIP
    >>> est.report_.ranks                      # doctest: +SKIP
    """

    def transform(self, X):
        self.report_ = rsi_hadamard(_as_trains(X), self._config())
        return self.report_.output


class RSIMap(_RsiParams):
    """Elementwise map ``func(*X)`` by RSI; ``func`` must act entrywise on arrays."""

    def __init__(self, func=None, chi_max=16, eps_id=1e-14, oversample_p=0, seed=0,
                 skip_sketch_auto=True, share_omegas=True, max_reseeds=2):
        super().__init__(chi_max, eps_id, oversample_p, seed, skip_sketch_auto, share_omegas, max_reseeds)
        self.func = func

    def fit(self, X=None, y=None):
        if not callable(self.func):
            raise TypeError("func must be callable")
        return super().fit(X, y)

    def transform(self, X):
        if not callable(self.func):
            raise TypeError("func must be callable")
        self.report_ = rsi_apply(_as_trains(X), self.func, self._config())
        return self.report_.output


class DirectProduct(BaseEstimator, TransformerMixin):
    """Kronecker-core product followed by rounding to ``chi_max``."""

    def __init__(self, chi_max=16, eps=1e-14, fold="full"):
        self.chi_max = chi_max
        self.eps = eps
        self.fold = fold

    def fit(self, X=None, y=None):
        check_int(self.chi_max, "chi_max", 1)
        check_real(self.eps, "eps", 0.0)
        return self

    def transform(self, X):
        self.result_ = direct_product(_as_trains(X), self.chi_max, self.eps, fold=self.fold)
        return self.result_.output


class TTRounder(BaseEstimator, TransformerMixin):
    def __init__(self, chi_max=16, eps=1e-14):
        self.chi_max = chi_max
        self.eps = eps

    def fit(self, X=None, y=None):
        check_int(self.chi_max, "chi_max", 1)
        check_real(self.eps, "eps", 0.0)
        return self

    def transform(self, X):
        return tt_round(X, self.chi_max, self.eps)


class QTTEncoder(BaseEstimator, TransformerMixin):
    """Encode a vectorized function ``f(x)`` as a quantics train on ``[a, b)``."""

    def __init__(self, n_bits=20, a=0.0, b=1.0, chi_max=64, eps=1e-14):
        self.n_bits = n_bits
        self.a = a
        self.b = b
        self.chi_max = chi_max
        self.eps = eps

    def fit(self, X=None, y=None):
        self.grid_ = QttGrid(self.n_bits, self.a, self.b)
        return self

    def transform(self, X):
        grid = QttGrid(self.n_bits, self.a, self.b)
        return qtt_from_function(X, grid, self.chi_max, self.eps)
