import numpy as np


def child_seed(seed, *keys) -> np.random.SeedSequence:
    """Independent stream for ``keys`` under a master ``seed`` (int, SeedSequence or None)."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + tuple(keys))
    return np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in keys))


def child_rng(seed, *keys) -> np.random.Generator:
    return np.random.default_rng(child_seed(seed, *keys))
