"""Tensor trains with Recursive Sketched Interpolation (RSI).

RSI builds the elementwise product of tensor trains, or an elementwise map of
one train, directly in compressed form at a cost cubic in the bond
dimension. The exact Kronecker-core product with SVD rounding is provided as
the baseline.
"""
from .direct import DirectResult, direct_product
from .exceptions import CapacityError, DegenerateSketchError, DomainError, ShapeError, TTError
from .interpolative import InterpolativeFactor, id_reconstruct, prrlu_row_id
from .observables import random_mps, z_deviation, zz_expectation, zz_from_probabilities
from .qtt import QttGrid, bits_to_x, builtin_functions, make_function, qtt_from_function
from .rsi import PivotTrail, RsiConfig, RsiReport, rsi_apply, rsi_hadamard, rsi_iteration, rsi_map
from .sketching import SketchBundle, make_omegas, make_sketch_bundle
from .tt import (
    TensorTrain,
    load_tt,
    relative_error,
    save_tt,
    tt_add,
    tt_eval,
    tt_from_dense,
    tt_from_json,
    tt_hadamard_direct,
    tt_inner,
    tt_norm,
    tt_normalize,
    tt_random,
    tt_rank1,
    tt_round,
    tt_to_dense,
    tt_to_json,
)

__version__ = "0.1.0"
