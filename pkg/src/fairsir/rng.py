"""Keyed random streams for reproducible, schedule-independent simulation.

Every stream is a counter-keyed Philox generator derived from
``(root seed, replication, time step, purpose tag)``.  Workers never share
generator state, so results are bit-identical no matter how replications or
rollouts are scheduled.
"""

from __future__ import annotations

import numpy as np

#: Purpose tags separating the streams consumed at one (replication, step).
PLANNING_STREAM = 0
EXECUTION_STREAM = 1

RngRoot = int | np.random.SeedSequence


def as_seed_sequence(root: RngRoot) -> np.random.SeedSequence:
    if isinstance(root, np.random.SeedSequence):
        return root
    return np.random.SeedSequence(root)


def stream_seed(
    seed: int, replication: int, step: int, stream: int
) -> np.random.SeedSequence:
    """Seed material for one purpose-tagged stream of one simulation step."""
    return np.random.SeedSequence(entropy=(seed, replication, step, stream))


def generator(root: RngRoot) -> np.random.Generator:
    """Philox generator for a seed or derived seed sequence."""
    return np.random.Generator(np.random.Philox(as_seed_sequence(root)))
