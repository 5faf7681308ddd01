"""Deterministic random-stream derivation.

Every stochastic routine in this package draws from a Philox counter-based
generator seeded through ``numpy.random.SeedSequence`` with an explicit
spawn key.  A stream is addressed by ``(master_seed, *key)`` where ``key``
is a tuple of non-negative integers.  Distinct keys give statistically
independent streams, and the stream content depends only on the key, never
on scheduling order or thread count.

Key convention used throughout the package:

* sampled circuit variant ``v`` of a run  -> key ``(*prefix, v)``
* auxiliary streams (resampling, shot draws for reference estimators)
  use key tuples of length >= 2 so they can never collide with bare
  variant keys.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream", "derive_seed"]


def stream(master_seed: int, *key: int) -> np.random.Generator:
    """Return the Philox generator addressed by ``(master_seed, *key)``."""
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(master_seed: int, *key: int) -> int:
    """Derive a 63-bit integer sub-seed for chaining into other seeded APIs."""
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
