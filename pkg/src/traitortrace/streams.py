"""Deterministic RNG stream derivation.

All randomness in the workbench flows from a single master seed through
`numpy.random.SeedSequence` spawn keys, so that code generation, collusion
and simulation draws come from provably independent streams and results do
not depend on execution order or process count.
"""

import numpy as np

# Child-stream indices used consistently by the CLI and the Monte Carlo
# harness when splitting one seed into per-purpose streams.
STREAM_BIAS = 0
STREAM_CODE = 1
STREAM_COALITION = 2
STREAM_FORGE = 3


def derive(seed, *key):
    """Return a `numpy.random.Generator` for stream `key` under `seed`.

    `key` is any tuple of non-negative ints; distinct keys give
    statistically independent PCG64 streams, identical keys give
    bit-identical ones.
    """
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def child_generators(stream, n_children=4):
    """Children of a `SeedSequence` without mutating its spawn counter.

    Equivalent to `stream.spawn(n_children)` on a freshly built sequence,
    but pure: the same `stream` always yields the same children, no matter
    how many times it is asked.
    """
    key = tuple(stream.spawn_key)
    children = [
        np.random.SeedSequence(entropy=stream.entropy, spawn_key=key + (i,))
        for i in range(n_children)
    ]
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def realization_children(seed, index, n_children=4):
    """The per-realization child generators (bias, code, coalition, forge)."""
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    ss = np.random.SeedSequence(seed, spawn_key=(int(index),))
    return child_generators(ss, n_children)
