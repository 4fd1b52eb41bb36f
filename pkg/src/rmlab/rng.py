"""Seed derivation and generator construction.

Every stochastic routine in the package receives either an explicit integer
seed or a generator built from one, so a run is a pure function of its seeds.
Child seeds are derived with the SplitMix64 output function, which gives
decorrelated 64-bit streams without any coordination between consumers.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
# golden-ratio increment of the SplitMix64 stream
_GAMMA = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """SplitMix64 finalizer, a bijection on 64-bit integers."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def child_seed(master_seed: int, stream_index: int) -> int:
    """Seed of the ``stream_index``-th child stream of ``master_seed``.

    Computed as ``mix64(master + (index + 1) * gamma)``, i.e. the SplitMix64
    output sequence started at the master seed.  The derivation does not
    depend on how many children are ever requested, so enlarging a trial
    budget extends the existing family of streams instead of reshuffling it.
    """
    if stream_index < 0:
        raise ValueError("stream_index must be nonnegative")
    return mix64((int(master_seed) + (stream_index + 1) * _GAMMA) & _MASK64)


def make_generator(seed: int) -> np.random.Generator:
    """Counter-based generator for a 64-bit seed.

    Philox is counter-based, so the stream for a given key is reproducible
    across platforms and independent of draw order elsewhere in the process.
    """
    return np.random.Generator(np.random.Philox(key=int(seed) & _MASK64))
