"""Deterministic seed derivation shared by all samplers.

Every source of randomness in this package flows from a single master seed
through :func:`derive_rng`. Sub-streams are addressed by an integer path
(e.g. read index, instance index), so results are independent of batching,
thread count, and scheduling.
"""

from __future__ import annotations

import numpy as np

__all__ = ["seed_sequence", "derive_rng"]


def seed_sequence(master_seed: int, *path: int) -> np.random.SeedSequence:
    """Mix a master seed with an integer path into a SeedSequence.

    The mixing function is ``SeedSequence(entropy=master_seed,
    spawn_key=path)``, which is a stable, documented part of NumPy's API.
    """
    return np.random.SeedSequence(
        entropy=int(master_seed), spawn_key=tuple(int(p) for p in path)
    )


def derive_rng(master_seed: int, *path: int) -> np.random.Generator:
    """Return a Generator for the sub-stream addressed by ``path``."""
    return np.random.default_rng(seed_sequence(master_seed, *path))
