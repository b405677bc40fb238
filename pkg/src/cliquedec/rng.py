"""Seeded substreams: one root seed fans out to independent counter-based
generators addressed by path, so parallel work is reproducible regardless of
scheduling or worker count.
"""

import numpy as np


def substream(seed, *path) -> np.random.Generator:
    """Philox generator for a (seed, path) address, e.g. (root, trial_index)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=path)))
