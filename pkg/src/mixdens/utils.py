"""Shared small helpers: named RNG substreams and grid integration."""

import zlib

import numpy as np

__all__ = ["substream", "trapezoid", "cumtrapz"]


def substream(seed: int, name: str) -> np.random.Generator:
    """Independent Generator for a named random stream under one master seed.

    The stream key is derived from the name with crc32, so the mapping is
    stable across processes and platforms (unlike the builtin hash).
    """
    key = zlib.crc32(name.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(key,)))


def trapezoid(values, grid) -> float:
    return float(np.trapezoid(values, grid))


def cumtrapz(values, grid) -> np.ndarray:
    """Cumulative trapezoid integral along the grid, starting at 0."""
    values = np.asarray(values, dtype=float)
    grid = np.asarray(grid, dtype=float)
    out = np.zeros_like(values)
    steps = np.diff(grid) * 0.5 * (values[1:] + values[:-1])
    np.cumsum(steps, out=out[1:])
    return out
