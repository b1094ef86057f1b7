"""
Deterministic random streams derived from a master seed.

Every random draw of a run is taken from a stream keyed by integers, so
results only depend on the master seed and never on scheduling.
"""
import numpy as np

SCREEN_STREAM = 0
PHOTON_STREAM = 1
COUNT_STREAM = 2
BOOTSTRAP_STREAM = 3
RETRACE_STREAM = 4
BEAM_STREAM = 5


def derive_seed(seed: int, *key: int) -> int:
    """
    Derive a child seed from a parent seed and a key path
    :param seed: Parent seed
    :param key: Integers identifying the child, e.g. (stream, index)
    :return: 64-bit child seed
    """
    sequence = np.random.SeedSequence(seed, spawn_key=key)
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))
