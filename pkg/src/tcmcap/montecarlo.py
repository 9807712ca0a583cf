"""Reproducible chunked Monte Carlo engine.

Work is split into fixed-size chunks; chunk ``i`` draws from a Philox
counter-based generator keyed by ``(seed, i)``, so the stream of every
chunk is independent of scheduling, and partial results are reduced in
chunk-index order.  Results are therefore bit-identical for any worker
count.  Normal variates come from ``numpy.random.Generator``'s ziggurat
sampler; this choice is fixed so seeds reproduce across releases.

Samplers are vectorized: ``sampler(rng, n)`` must return ``n`` values.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quadrature import EstimateWithError

__all__ = ["MCConfig", "estimate_mean", "sample_array", "gaussian_vector",
           "chunk_rng", "worker_count"]

Sampler = Callable[[np.random.Generator, int], np.ndarray]

_U64 = np.uint64


@dataclass(frozen=True)
class MCConfig:
    samples: int
    seed: int = 42
    chunk_size: int = 1_000_000

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be positive")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


def worker_count(requested: int | None = None) -> int:
    """Worker cap: explicit argument, else TCMCAP_THREADS, else cpu count."""
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("TCMCAP_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


def chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    """Independent generator for one chunk, keyed by (seed, chunk index)."""
    key = np.array([_U64(seed), _U64(chunk_index)], dtype=_U64)
    return np.random.Generator(np.random.Philox(key=key))


def _chunks(cfg: MCConfig) -> list[tuple[int, int]]:
    out = []
    start = 0
    idx = 0
    while start < cfg.samples:
        n = min(cfg.chunk_size, cfg.samples - start)
        out.append((idx, n))
        start += n
        idx += 1
    return out


def _map_chunks(fn, cfg: MCConfig, workers: int | None):
    chunks = _chunks(cfg)
    n_workers = min(worker_count(workers), len(chunks))
    if n_workers <= 1:
        return [fn(idx, n) for idx, n in chunks]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(lambda c: fn(*c), chunks))


def estimate_mean(sampler: Sampler, cfg: MCConfig,
                  workers: int | None = None) -> EstimateWithError:
    """Sample mean of ``sampler`` with one standard error.

    The reduction runs in chunk-index order regardless of which worker
    finished first, so identical ``(seed, samples, chunk_size)`` give
    bit-identical results for 1, 2 or 8 workers.
    """
    def one(idx: int, n: int) -> tuple[float, float]:
        x = np.asarray(sampler(chunk_rng(cfg.seed, idx), n), dtype=float)
        if x.shape != (n,):
            raise ValueError(f"sampler returned shape {x.shape}, expected ({n},)")
        return float(np.sum(x)), float(np.sum(x * x))

    parts = _map_chunks(one, cfg, workers)
    total = 0.0
    total_sq = 0.0
    for s, s2 in parts:  # fixed order
        total += s
        total_sq += s2
    n = cfg.samples
    mean = total / n
    if n == 1:
        return EstimateWithError(mean, 0.0)
    var = max(0.0, (total_sq - n * mean * mean) / (n - 1))
    return EstimateWithError(mean, float(np.sqrt(var / n)))


def sample_array(sampler: Sampler, cfg: MCConfig,
                 workers: int | None = None) -> np.ndarray:
    """All sampled values concatenated in chunk order (for reweighting)."""
    def one(idx: int, n: int) -> np.ndarray:
        x = np.asarray(sampler(chunk_rng(cfg.seed, idx), n), dtype=float)
        if x.shape != (n,):
            raise ValueError(f"sampler returned shape {x.shape}, expected ({n},)")
        return x

    return np.concatenate(_map_chunks(one, cfg, workers))


def gaussian_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    """d iid standard normal components, advancing ``rng`` deterministically."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return rng.standard_normal(int(d))
