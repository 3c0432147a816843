"""Ball-growth dimension estimation for space graphs.

If |B(v, r)| grows like r^D over a radius window the graph behaves as
D-dimensional there.  The window is caller-chosen on purpose: sampling too
few or too many vertices (radii near 0 or near the diameter) bends the
log-log curve away from the growth exponent.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import SpaceGraph


class DegenerateWindowError(Exception):
    """Radius window too small or reaching the graph boundary."""


@dataclass(frozen=True)
class DimensionEstimate:
    dimension: float
    residual: float
    radii: tuple[int, ...]
    mean_ball_sizes: tuple[float, ...]
    centers: tuple[int, ...]


def estimate_dimension(
    g: SpaceGraph,
    centers: Sequence[int] | int,
    r_min: int,
    r_max: int,
    *,
    seed: int = 0,
) -> DimensionEstimate:
    """Least-squares slope of log |B(v, r)| against log r over [r_min, r_max].

    `centers` is either an explicit vertex list or a sample size drawn
    seeded from the vertex set.  Requires at least 3 radii, all below every
    sampled center's eccentricity.
    """
    if r_min < 1:
        raise ValueError("r_min must be at least 1")
    if isinstance(centers, int):
        if centers < 1:
            raise ValueError("need at least one center")
        rng = random.Random(seed)
        pool = sorted(g.vertices)
        centers = sorted(rng.sample(pool, min(centers, len(pool))))
    else:
        centers = sorted(centers)
        if not centers:
            raise ValueError("need at least one center")
    radii = tuple(range(r_min, r_max + 1))
    if len(radii) < 3:
        raise DegenerateWindowError(
            f"window [{r_min}, {r_max}] has {len(radii)} radii, need at least 3"
        )
    sizes = np.zeros((len(centers), len(radii)))
    for i, center in enumerate(centers):
        dist = g.bfs_distances(center)
        eccentricity = max(dist.values())
        if r_max >= eccentricity:
            raise DegenerateWindowError(
                f"r_max={r_max} reaches eccentricity {eccentricity} of vertex "
                f"{center}: balls saturate inside the window"
            )
        values = np.fromiter(dist.values(), dtype=np.int64)
        for j, r in enumerate(radii):
            sizes[i, j] = int((values <= r).sum())
    mean_sizes = sizes.mean(axis=0)
    log_r = np.log(np.array(radii, dtype=float))
    log_b = np.log(mean_sizes)
    slope, intercept = np.polyfit(log_r, log_b, 1)
    fitted = slope * log_r + intercept
    residual = float(np.sqrt(np.mean((log_b - fitted) ** 2)))
    return DimensionEstimate(
        float(slope), residual, radii, tuple(float(s) for s in mean_sizes), tuple(centers)
    )
