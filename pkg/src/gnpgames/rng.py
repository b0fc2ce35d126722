"""Seeded, splittable randomness.

All randomness in this package flows through two primitives built on
numpy's counter-based Philox generator:

* ``pair_uniforms(seed, count)`` gives one uniform per index of a fixed
  enumeration (used for G(n,p) sampling: index i of the stream belongs to
  pair i in lexicographic order, so the sampled graph is a pure function
  of (n, p, seed) and never depends on evaluation order).
* ``substream(seed, *path)`` derives an independent generator for a
  labelled purpose (one per trial, per player, per sampling task) via
  ``SeedSequence`` spawn keys, so concurrent consumers never share state.
"""

from __future__ import annotations

import numpy as np

__all__ = ["pair_uniforms", "substream", "derive_seed"]

_MASK64 = (1 << 64) - 1


def pair_uniforms(seed: int, count: int) -> np.ndarray:
    """Uniform[0,1) draws 0..count-1 of the Philox stream keyed by ``seed``.

    Draw i is a deterministic function of (seed, i): Philox is counter
    based, so the i-th output never depends on how many draws were made
    before or after it in other calls.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    gen = np.random.Generator(np.random.Philox(key=seed & _MASK64))
    return gen.random(count)


def substream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for the substream labelled by ``path``.

    Identical (seed, path) always yields an identical stream; distinct
    paths yield statistically independent streams.
    """
    ss = np.random.SeedSequence(entropy=seed & _MASK64, spawn_key=tuple(path))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *path: int) -> int:
    """A stable 64-bit seed derived from (seed, path), for nested seeding."""
    ss = np.random.SeedSequence(entropy=seed & _MASK64, spawn_key=tuple(path))
    return int(ss.generate_state(1, np.uint64)[0])
