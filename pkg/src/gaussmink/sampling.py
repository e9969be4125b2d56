"""Deterministic Monte Carlo sampling streams.

Samples come from the counter-based Philox generator keyed by
``(seed, chunk_index)``.  Chunk c of a stream is a pure function of the seed
and c, so any partition of the chunk range across workers reproduces the same
sample set and the same estimate.  Re-running with the same seed is
bit-identical.
"""

from __future__ import annotations

import numpy as np

CHUNK_SIZE = 1 << 14


def _generator(seed: int, chunk_index: int) -> np.random.Generator:
    # Philox key is 128 bits: high word = user seed, low word = chunk index.
    key = (int(seed) << 64) + int(chunk_index)
    return np.random.Generator(np.random.Philox(key=key))


def normal_chunk(seed: int, chunk_index: int, dim: int, count: int = CHUNK_SIZE) -> np.ndarray:
    """Standard normal points, shape (count, dim), for one chunk of a stream."""
    return _generator(seed, chunk_index).standard_normal((count, dim))


def iter_normal_chunks(seed: int, dim: int, total: int):
    """Yield standard normal batches covering exactly `total` samples.

    The last chunk is truncated by slicing, so the points seen for a given
    (seed, chunk) pair never depend on `total`.
    """
    if total <= 0:
        raise ValueError(f"total sample count must be positive, got {total}")
    emitted = 0
    chunk_index = 0
    while emitted < total:
        take = min(CHUNK_SIZE, total - emitted)
        yield normal_chunk(seed, chunk_index, dim)[:take]
        emitted += take
        chunk_index += 1


def monte_carlo_fractions(mask_fns, dim: int, n_samples: int, seed: int):
    """Estimate P[event] for several events on one common sample stream.

    mask_fns: list of callables mapping a (k, dim) batch to boolean masks.
    Returns (values, std_errors) arrays.  Sharing the stream across events
    gives common random numbers, so differences of the returned values have
    far lower variance than independent runs would.
    """
    hits = np.zeros(len(mask_fns), dtype=np.int64)
    for batch in iter_normal_chunks(seed, dim, n_samples):
        for k, fn in enumerate(mask_fns):
            hits[k] += int(np.count_nonzero(fn(batch)))
    values = hits / float(n_samples)
    std_errors = np.sqrt(np.maximum(values * (1.0 - values), 0.0) / n_samples)
    return values, std_errors
