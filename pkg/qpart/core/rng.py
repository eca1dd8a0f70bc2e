"""
Named, seeded random streams

Every stochastic stage draws from a stream derived from the run seed, a
stream name and optional integer indices, so any stage can be reproduced
on its own.
"""

import zlib

import numpy as np

COARSEN_KMEANS = "coarsen.kmeans"
COARSEN_TRIALS = "coarsen.trials"
QAOA_SAMPLE = "qaoa.sample"
FM_SHUFFLE = "fm.shuffle"
PARAM_SAMPLE = "param.sample"
DISSECTION_BLOCK = "dissection.block"


def stream_seed(seed: int, name: str, *index: int) -> np.random.SeedSequence:
    """SeedSequence for stream `name` at the given indices"""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    entropy = [int(seed), zlib.crc32(name.encode("utf-8"))]
    entropy.extend(int(i) for i in index)
    return np.random.SeedSequence(entropy)


def stream(seed: int, name: str, *index: int) -> np.random.Generator:
    """Generator for stream `name` at the given indices"""
    return np.random.Generator(np.random.PCG64(stream_seed(seed, name, *index)))


def child_seed(seed: int, name: str, *index: int) -> int:
    """Derive a plain integer seed (for APIs taking int seeds)"""
    return int(stream_seed(seed, name, *index).generate_state(1, dtype=np.uint32)[0])
