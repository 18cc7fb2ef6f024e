"""Input validation helpers shared by the functional API and the estimators."""
import numbers

import numpy as np

from .exceptions import DomainError, ShapeError


def check_int(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if minimum is not None and value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_real(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    if minimum is not None and value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_finite(array, name="array"):
    array = np.asarray(array, dtype=float)
    bad = ~np.isfinite(array)
    if bad.any():
        idx = tuple(int(i) for i in np.unravel_index(np.argmax(bad), array.shape))
        raise DomainError(f"{name} has a non-finite entry {array[idx]} at index {idx}")
    return array


def check_tensor_train(tt):
    """Check the structural invariants of a TensorTrain; return it unchanged."""
    from .tt import TensorTrain

    if not isinstance(tt, TensorTrain):
        raise TypeError(f"expected a TensorTrain, got {type(tt).__name__}")
    cores = tt.cores
    if len(cores) < 2:
        raise ShapeError("a tensor train needs at least two cores")
    if cores[0].shape[0] != 1 or cores[-1].shape[2] != 1:
        raise ShapeError("boundary bond dimensions must be 1")
    for j, core in enumerate(cores):
        if core.ndim != 3 or min(core.shape) < 1:
            raise ShapeError(f"core {j} has invalid shape {core.shape}")
        if j + 1 < len(cores) and core.shape[2] != cores[j + 1].shape[0]:
            raise ShapeError(
                f"bond mismatch between cores {j} and {j + 1}: "
                f"{core.shape[2]} != {cores[j + 1].shape[0]}"
            )
    return tt


def check_compatible(*tts):
    """All trains must share order and physical dimensions."""
    if not tts:
        raise ShapeError("at least one tensor train is required")
    for tt in tts:
        check_tensor_train(tt)
    dims = tts[0].phys_dims
    for i, tt in enumerate(tts[1:], start=1):
        if tt.phys_dims != dims:
            raise ShapeError(
                f"input {i} has physical dims {tt.phys_dims}, expected {dims}"
            )
    return tts
