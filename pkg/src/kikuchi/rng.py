"""Counter-based random streams derived from (seed, component tag, counters).

Every random quantity in the package is drawn from a Philox stream keyed by a
master seed, a component tag and optional integer counters (cell, trial, ...),
so any piece of an experiment can be regenerated in isolation. Gaussians are
produced by Box-Muller from the stream's uniforms rather than by numpy's
normal sampler, whose internals are not part of its stability guarantee.
"""

from __future__ import annotations

import zlib

import numpy as np

from .errors import ParameterError

_U64 = 1 << 64


def _spawn_key(tag: str, counters: tuple[int, ...]) -> tuple[int, ...]:
    for c in counters:
        if c < 0:
            raise ParameterError(f"stream counters must be non-negative, got {c}")
    return (zlib.crc32(tag.encode()),) + tuple(int(c) for c in counters)


def stream(seed: int, tag: str, *counters: int) -> np.random.Generator:
    """Independent Philox generator for ``(seed, tag, *counters)``."""
    if not (0 <= int(seed) < _U64):
        raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=_spawn_key(tag, counters))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, tag: str, *counters: int) -> int:
    """A 64-bit child seed, reproducible from its inputs alone."""
    if not (0 <= int(seed) < _U64):
        raise ParameterError(f"seed must be a 64-bit unsigned integer, got {seed}")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=_spawn_key(tag, counters))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def standard_normal(gen: np.random.Generator, size: int) -> np.ndarray:
    """``size`` i.i.d. N(0,1) draws via Box-Muller on ``gen``'s uniforms."""
    half = (size + 1) // 2
    u = gen.random((2, half))
    radius = np.sqrt(-2.0 * np.log1p(-u[0]))  # 1 - u in (0, 1]
    angle = 2.0 * np.pi * u[1]
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
    return z[:size]


def signs(gen: np.random.Generator, size: int) -> np.ndarray:
    """``size`` i.i.d. uniform +-1 values as float64."""
    return np.where(gen.random(size) < 0.5, -1.0, 1.0)
