"""Nearest-neighbour ``S^z S^z`` correlators of spin-1 chains in MPS form.

``zz_expectation`` contracts ``<psi| sum_j S^z_j S^z_{j+1} |psi>`` with
two-layer transfer matrices. ``zz_from_probabilities`` gets the same number
from the diagonal ``p = |psi|^2`` by contracting one layer with weight
vectors, which is how the accuracy of an approximated ``|psi|^2`` is probed.
"""
import numpy as np

from .tt import TensorTrain, tt_normalize, tt_random, tt_round
from .validation import check_real, check_tensor_train

#: Diagonal of ``S^z`` for spin 1, in the basis order of the physical index.
SPIN1_SZ = np.array([1.0, 0.0, -1.0])


def _sz_for(tt, sz):
    sz = SPIN1_SZ if sz is None else np.asarray(sz, dtype=float)
    if any(d != sz.size for d in tt.phys_dims):
        raise ValueError(f"S^z has {sz.size} levels but the physical dims are {tt.phys_dims}")
    return sz


def zz_expectation(psi, sz=None):
    """``<psi|H_zz|psi>`` by transfer matrices over two copies of ``psi``."""
    check_tensor_train(psi)
    sz = _sz_for(psi, sz)
    n = psi.n_sites
    # env[0]: no operator placed, env[1]: S^z on the previous site, env[2]: pair done
    env = [np.ones((1, 1)), np.zeros((1, 1)), np.zeros((1, 1))]

    def step(e, core, w):
        tmp = np.tensordot(e, core * w[None, :, None], axes=(0, 0))
        return np.tensordot(tmp, core, axes=([0, 1], [0, 1]))

    ones = np.ones_like(sz)
    for j, core in enumerate(psi.cores):
        plain = step(env[0], core, ones)
        opened = step(env[0], core, sz)
        closed = step(env[1], core, sz)
        done = step(env[2], core, ones)
        env = [plain, opened if j < n - 1 else 0 * plain, done + closed]
    return float(env[2][0, 0])


def zz_from_probabilities(p, sz=None):
    """``sum_j sum_sigma p(sigma) s_j s_{j+1}`` for a TT ``p`` over configurations."""
    check_tensor_train(p)
    sz = _sz_for(p, sz)
    ones = np.ones_like(sz)
    plain = [np.tensordot(c, ones, axes=(1, 0)) for c in p.cores]
    weighted = [np.tensordot(c, sz, axes=(1, 0)) for c in p.cores]
    # same three-state recursion as above, one layer
    env = [np.ones((1,)), np.zeros((1,)), np.zeros((1,))]
    n = p.n_sites
    for j in range(n):
        a = env[0] @ plain[j]
        opened = env[0] @ weighted[j] if j < n - 1 else 0 * a
        done = env[2] @ plain[j] + env[1] @ weighted[j]
        env = [a, opened, done]
    return float(env[2][0])


def z_deviation(psi, p, sz=None):
    """``|<psi|H_zz|psi> - sum_sigma p(sigma) h_zz(sigma)|``."""
    return abs(zz_expectation(psi, sz) - zz_from_probabilities(p, sz))


def random_mps(n, d, chi, seed, decay=0.5):
    """Normalized random MPS whose bond weights fall off geometrically.

    Core entries are standard normal; the right bond index ``b`` of every
    core is scaled by ``decay**b`` before the train is brought to canonical
    form, so the entanglement spectrum decays like that of a gapped ground
    state. ``decay=1`` gives the plain i.i.d. Gaussian train.
    """
    check_real(decay, "decay", 0.0)
    if not 0.0 < decay <= 1.0:
        raise ValueError(f"decay must lie in (0, 1], got {decay}")
    base = tt_random(n, d, chi, seed)
    cores = [c * (decay ** np.arange(c.shape[2]))[None, None, :] for c in base.cores]
    return tt_normalize(tt_round(TensorTrain(cores, copy=False), chi, 0.0))
