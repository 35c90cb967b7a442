"""Block-seeded Monte Carlo driver.

Realizations are grouped into fixed-size blocks.  Block ``b`` draws from the
stream ``make_rng(SeedSpec(master_seed, first_index + b))`` and per-realization
results are concatenated in block order before any reduction, so the output
does not depend on how many workers ran the blocks.
"""

from __future__ import annotations

import math
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, NamedTuple

import numpy as np

from .distributions import SeedSpec, make_rng
from .errors import InvalidParameterError

DEFAULT_BLOCK_SIZE = 500

Kernel = Callable[[np.random.Generator, int], dict]


class Estimate(NamedTuple):
    mean: float
    se: float
    count: int


def summarize(values) -> Estimate:
    """Mean and standard error (sample sd / sqrt(count)) ignoring NaN entries."""
    values = np.asarray(values, dtype=float)
    values = values[~np.isnan(values)]
    count = values.size
    if count == 0:
        return Estimate(math.nan, math.nan, 0)
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(count)) if count > 1 else math.nan
    return Estimate(mean, se, count)


def _block_sizes(realizations: int, block_size: int) -> list[int]:
    full, rest = divmod(realizations, block_size)
    return [block_size] * full + ([rest] if rest else [])


def _run_one(kernel: Kernel, master_seed: int, index: int, count: int) -> dict:
    return kernel(make_rng(SeedSpec(master_seed, index)), count)


def run_blocks(
    kernel: Kernel,
    realizations: int,
    master_seed: int,
    *,
    block_size: int = DEFAULT_BLOCK_SIZE,
    workers: int = 1,
    first_index: int = 0,
    progress: bool = False,
) -> dict[str, np.ndarray]:
    """Run ``kernel(rng, count)`` over all blocks and stack the results.

    The kernel returns a dict of arrays whose leading axis has length
    ``count``.  With ``workers > 1`` blocks run in a process pool; the kernel
    must then be picklable (a module-level function or a ``functools.partial``).
    """
    if realizations < 1:
        raise InvalidParameterError(f"realizations must be positive, got {realizations}")
    if block_size < 1:
        raise InvalidParameterError(f"block_size must be positive, got {block_size}")
    sizes = _block_sizes(realizations, block_size)
    indices = [first_index + b for b in range(len(sizes))]

    if workers > 1 and len(sizes) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_one, kernel, master_seed, i, c) for i, c in zip(indices, sizes)]
            parts = []
            for done, fut in enumerate(futures, 1):
                parts.append(fut.result())
                if progress:
                    print(f"  block {done}/{len(sizes)}", file=sys.stderr)
    else:
        parts = []
        for done, (i, c) in enumerate(zip(indices, sizes), 1):
            parts.append(_run_one(kernel, master_seed, i, c))
            if progress:
                print(f"  block {done}/{len(sizes)}", file=sys.stderr)

    return {key: np.concatenate([p[key] for p in parts], axis=0) for key in parts[0]}


def block_moments(values: np.ndarray) -> dict:
    """Per-block count, mean and centered sum of squares along axis 0."""
    mean = values.mean(axis=0)
    m2 = ((values - mean) ** 2).sum(axis=0)
    return {"count": np.array([values.shape[0]]), "mean": mean[np.newaxis], "m2": m2[np.newaxis]}


def merge_moments(counts, means, m2s) -> tuple[np.ndarray, np.ndarray, int]:
    """Combine block moments in the given order; returns mean, standard error and count."""
    total = int(counts[0])
    mean = np.array(means[0], dtype=float)
    m2 = np.array(m2s[0], dtype=float)
    for c, mu, s2 in zip(counts[1:], means[1:], m2s[1:]):
        c = int(c)
        delta = mu - mean
        new_total = total + c
        mean = mean + delta * (c / new_total)
        m2 = m2 + s2 + delta**2 * (total * c / new_total)
        total = new_total
    se = np.sqrt(m2 / (total - 1) / total) if total > 1 else np.full_like(mean, np.nan)
    return mean, se, total
