"""Deterministic, splittable random-number substreams.

Every stochastic quantity in an experiment is drawn from a substream
identified by (seed, *path).  Substreams are mutually independent and
reproducible on all platforms, so trials can be generated in any order
(or in parallel) without changing the results.
"""

import numpy as np


def make_rng(seed: int, *path: int) -> np.random.Generator:
    """Generator on the substream addressed by an integer path under `seed`."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.PCG64(ss))
