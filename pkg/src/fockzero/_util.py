"""Small shared helpers: threading cap and deterministic quasi-random points."""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

# R2 low-discrepancy sequence (plastic-number based); irrationals chosen so
# consecutive points fill the unit square without lattice-aligned artifacts.
_PLASTIC = 1.3247179572447460260
_R2_A1 = 1.0 / _PLASTIC
_R2_A2 = 1.0 / (_PLASTIC * _PLASTIC)


def thread_count() -> int:
    """Worker cap from FOCKZERO_THREADS; implementation default otherwise."""
    raw = os.environ.get("FOCKZERO_THREADS", "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError:
            n = 1
        return max(1, n)
    return min(4, os.cpu_count() or 1)


def map_ordered(fn, items):
    """Map preserving item order; threads only when allowed and worthwhile.

    Each task must be independent; results are reduced by the caller in
    list order, so the output is identical with any worker count.
    """
    items = list(items)
    workers = thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def _mix64(x: int) -> int:
    """splitmix64 finalizer; cheap deterministic hash for seed offsets."""
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


def r2_sequence(n: int, seed: int, stream: int) -> np.ndarray:
    """First n points of a seeded R2 sequence in [0,1)^2, shape (n, 2).

    Deterministic in (seed, stream); the first n points are a prefix of the
    first 2n, so refined scans strictly extend coarse ones.
    """
    h = _mix64((seed & 0xFFFFFFFFFFFFFFFF) ^ _mix64(stream))
    u0 = (h >> 11) / float(1 << 53)
    v0 = (_mix64(h) >> 11) / float(1 << 53)
    j = np.arange(n, dtype=np.float64)
    u = np.mod(u0 + j * _R2_A1, 1.0)
    v = np.mod(v0 + j * _R2_A2, 1.0)
    return np.column_stack([u, v])


def annulus_points(r_in: float, r_out: float, n: int, seed: int,
                   stream: int) -> np.ndarray:
    """n quasi-random complex points, area-uniform in the annulus."""
    uv = r2_sequence(n, seed, stream)
    r = np.sqrt(r_in * r_in + uv[:, 0] * (r_out * r_out - r_in * r_in))
    theta = 2.0 * np.pi * uv[:, 1]
    return r * np.exp(1j * theta)


def kahan_add(total: np.ndarray, comp: np.ndarray, value: np.ndarray) -> None:
    """In-place compensated accumulation: (total, comp) += value.

    Infinite totals (points parked on a zero of a product) make the
    compensation term NaN; the total itself stays correct.
    """
    with np.errstate(invalid="ignore"):
        y = value - comp
        t = total + y
        comp[...] = np.where(np.isfinite(t), (t - total) - y, 0.0)
        total[...] = t
