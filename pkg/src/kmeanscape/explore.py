"""Landscape exploration: seeded uniform starts funnelled into the store.

Start i of a run with master seed s draws its centres from the portable
generator seeded with (s, i), so results are identical for any worker
count; parallel chunks are merged in submission order through the single
writer, keeping minima ids stable.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import canonical_key, local_minimize, sample_uniform_start
from .store import LandscapeDB


@dataclass
class ExploreStats:
    n_starts: int
    inserted: int
    duplicates: int
    rejected: int
    wall_time: float


def _run_chunk(points, lo, hi, k, seed):
    """Minimise starts [lo, hi); return first-occurrence candidates with counts."""
    found = {}
    rejected = 0
    for i in range(lo, hi):
        start = sample_uniform_start(points, k, (seed, i))
        cand = local_minimize(points, start)
        if not cand.valid:
            rejected += 1
            continue
        key = canonical_key(cand.labels)
        if key in found:
            found[key][1] += 1
        else:
            found[key] = [cand, 1]
    return list(found.values()), rejected


def explore(dataset, k, n_starts, seed, threads=1) -> tuple:
    """Sample, minimise and deduplicate; returns (LandscapeDB, ExploreStats)."""
    if k < 1 or n_starts < 1:
        raise ValueError("k and n_starts must be at least 1")
    t0 = time.perf_counter()
    db = LandscapeDB(dataset_hash=dataset.hash(), k=int(k), seed=int(seed))
    points = dataset.points

    inserted = duplicates = rejected = 0
    if threads <= 1:
        chunks = [_run_chunk(points, 0, n_starts, k, seed)]
    else:
        bounds = np.linspace(0, n_starts, threads * 4 + 1).astype(int)
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(
                pool.map(
                    _run_chunk,
                    [points] * (len(bounds) - 1),
                    bounds[:-1],
                    bounds[1:],
                    [k] * (len(bounds) - 1),
                    [seed] * (len(bounds) - 1),
                )
            )

    for candidates, n_rej in chunks:
        rejected += n_rej
        for cand, count in candidates:
            status, min_id = db.minima.dedup_insert(cand)
            if status == "inserted":
                inserted += 1
                duplicates += count - 1
                db.minima.get(min_id).attempts += count - 1
            elif status == "duplicate":
                duplicates += count
                db.minima.get(min_id).attempts += count - 1
            else:
                rejected += count

    stats = ExploreStats(
        n_starts=n_starts,
        inserted=inserted,
        duplicates=duplicates,
        rejected=rejected,
        wall_time=time.perf_counter() - t0,
    )
    return db, stats
