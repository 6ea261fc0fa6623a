"""Counter-based deterministic sampling.

Sample i is a pure function of (seed, i): it is read from its own Philox
counter block, so any contiguous range of samples can be generated by any
worker without touching the rest of the stream.  Each 256-bit counter block
yields four doubles; we keep the first per block, which makes block
generation and per-sample generation bit-identical.
"""

import numpy as np

from zetalab.errors import DomainError

_MAX_SEED = 2**64


def counter_uniforms(seed, start, count):
    """count uniforms on [0, 1); element i depends only on (seed, start + i)."""
    if not 0 <= seed < _MAX_SEED:
        raise DomainError("seed must be an unsigned 64-bit integer")
    if count < 0 or start < 0:
        raise DomainError("start and count must be nonnegative")
    if count == 0:
        return np.empty(0)
    bg = np.random.Philox(key=seed, counter=[start, 0, 0, 0])
    raw = np.random.Generator(bg).random(4 * count)
    return raw[::4].copy()


def sample_tau(T, n, seed):
    """n heights uniform on [T, 2T], derived counter-style from (seed, index)."""
    if n < 1:
        raise DomainError("need at least one sample")
    if T <= 0:
        raise DomainError("T must be positive")
    return T * (1.0 + counter_uniforms(seed, 0, n))
