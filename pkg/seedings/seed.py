"""
Random stream derivation.

Every random draw in a run comes from a generator derived from the single
master seed plus a purpose tag and optional (round, client) keys, so streams
never depend on call order or on how many other streams were used.
"""

import numpy as np

PARTITION_STREAM = "partition"
SPLIT_STREAM = "split"
SYNTH_STREAM = "synth"
BUDGET_STREAM = "budgets"
ACTIVES_STREAM = "actives"
DYNACOMM_STREAM = "dynacomm"
GENETIC_STREAM = "genetic"
RANDOM_SELECT_STREAM = "random"
CLIENT_STREAM = "client"
INIT_STREAM = "init"
BENCH_STREAM = "bench"
THEORY_STREAM = "theory"

# Stable integer ids for purpose tags; python's hash() is salted per process.
_STREAM_IDS = {
    PARTITION_STREAM: 1,
    SPLIT_STREAM: 2,
    SYNTH_STREAM: 3,
    BUDGET_STREAM: 4,
    ACTIVES_STREAM: 5,
    DYNACOMM_STREAM: 6,
    GENETIC_STREAM: 7,
    RANDOM_SELECT_STREAM: 8,
    CLIENT_STREAM: 9,
    INIT_STREAM: 10,
    BENCH_STREAM: 11,
    THEORY_STREAM: 12,
}

_SEED_MASK = (1 << 64) - 1


def derive_seed(master_seed: int, purpose: str, *keys: int) -> int:
    """
    Derive a 64-bit integer seed for one purpose-tagged stream.

    Args:
        master_seed (int): The run's master seed.
        purpose (str): One of the *_STREAM tags defined in this module.
        *keys (int): Additional non-negative keys such as round index and client id.

    Returns:
        int: A seed suitable for numpy.random.default_rng or further derivation.
    """
    sequence = np.random.SeedSequence(_entropy(master_seed, purpose, keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def derive_rng(master_seed: int, purpose: str, *keys: int) -> np.random.Generator:
    """Return a fresh Generator for the (master seed, purpose, keys) stream."""
    return np.random.default_rng(np.random.SeedSequence(_entropy(master_seed, purpose, keys)))


def _entropy(master_seed: int, purpose: str, keys: tuple) -> list:
    if purpose not in _STREAM_IDS:
        raise KeyError(f"unknown random stream {purpose!r}")
    return [int(master_seed) & _SEED_MASK, _STREAM_IDS[purpose], *[int(k) for k in keys]]
