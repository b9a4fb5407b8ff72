"""Seeded random streams.

All randomness flows through Philox4x64 (numpy's ``Philox`` bit generator)
keyed by a ``SeedSequence``.  Normals use the Box-Muller transform on pairs
of uniforms, so draw ``i`` of a stream depends only on the key and ``i``.
"""

from __future__ import annotations

import numpy as np


def derive_seed(seed: int, *index: int) -> int:
    """A 32-bit child seed for the indexed sub-stream ``(seed, *index)``."""
    return int(np.random.SeedSequence([int(seed), *map(int, index)]).generate_state(1)[0])


def uniforms(seed: int, count: int) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(int(seed)))
    return gen.random(count)


def gaussians(seed: int, shape) -> np.ndarray:
    """Standard normals of the given shape, filled in C order."""
    count = int(np.prod(shape))
    half = (count + 1) // 2
    u = uniforms(seed, 2 * half)
    radius = np.sqrt(-2.0 * np.log1p(-u[0::2]))
    angle = 2.0 * np.pi * u[1::2]
    z = np.empty(2 * half)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    return z[:count].reshape(shape)
