"""Sampling and Monte Carlo probes for Boolean models with ball grains.

Realizations are sampled on a cubic observation window with the germ
process extended into a margin of one maximal radius, so that grains
whose centers fall outside the window still contribute their overlap;
inside the window the restriction is then distributed exactly like the
restriction of the stationary model.

Two independent Monte Carlo routes are provided for probabilities of
finite-point events.  ``configuration_probability_mc`` samples the germs
near a configuration directly and evaluates the hit-or-miss event.
``miss_probability_mc`` never samples the process at all: it estimates
the mean volume of the union of balls centered at the test points by
volume sampling and applies the void formula
P(no point of S is covered) = exp(-gamma E V_3(union of balls at S)).
Agreement between the two is a strong consistency check because they
share no code path beyond the radius law.

All randomness flows through counter-based generators derived from a
single seed, with one child stream per fixed-size batch, so results are
reproducible across runs and platforms and do not depend on how many
batches were needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import BallModelParams

#: Replications per generator child stream.  Fixed so that a probe with a
#: given seed and replication count always consumes the same substreams.
BATCH_SIZE = 1 << 16

_BALL_CHUNK = 1 << 7
_POINT_CHUNK = 1 << 14


@dataclass(frozen=True)
class MCEstimate:
    """A Monte Carlo estimate with its binomial or sample standard error."""

    value: float
    std_error: float
    samples: int


@dataclass(frozen=True)
class Realization:
    """Grains of one sampled Boolean model restricted to a window.

    Centers live in the dilated box [-margin, window + margin]^3; the
    observation window itself is [0, window]^3.
    """

    centers: np.ndarray
    radii: np.ndarray
    window: float
    margin: float


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def _child_generators(seed: int, count: int):
    for child in np.random.SeedSequence(seed).spawn(count):
        yield np.random.Generator(np.random.Philox(child))


def sample_realization(
    model: BallModelParams, window: float, seed: int
) -> Realization:
    """Draw one realization on [0, window]^3 with exact edge handling."""
    if not (math.isfinite(window) and window > 0):
        raise ValueError(f"window must be finite and positive, got {window}")
    margin = model.radius.upper
    side = window + 2.0 * margin
    rng = _generator(seed)
    count = int(rng.poisson(model.intensity * side**3))
    centers = rng.uniform(-margin, window + margin, size=(count, 3))
    radii = model.radius.sample(rng, count)
    return Realization(centers, radii, float(window), float(margin))


def contains(realization: Realization, points) -> np.ndarray:
    """Boolean coverage of query points by the union of grains."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != 3:
        raise ValueError(f"expected points of shape (n, 3), got {pts.shape}")
    covered = np.zeros(len(pts), dtype=bool)
    centers, radii = realization.centers, realization.radii
    for p0 in range(0, len(pts), _POINT_CHUNK):
        block = pts[p0 : p0 + _POINT_CHUNK]
        hit = covered[p0 : p0 + _POINT_CHUNK]
        for b0 in range(0, len(centers), _BALL_CHUNK):
            cen = centers[b0 : b0 + _BALL_CHUNK]
            rad = radii[b0 : b0 + _BALL_CHUNK]
            d2 = ((block[:, None, :] - cen[None, :, :]) ** 2).sum(axis=2)
            hit |= (d2 <= rad**2).any(axis=1)
        covered[p0 : p0 + _POINT_CHUNK] = hit
    return covered


def _coverage_by_replication(
    points: np.ndarray,
    centers: np.ndarray,
    sq_radii: np.ndarray,
    rep_index: np.ndarray,
    replications: int,
) -> np.ndarray:
    """(n_points, replications) bool: point covered by its replication's grains."""
    out = np.empty((len(points), replications), dtype=bool)
    for i, p in enumerate(points):
        hit = ((centers - p) ** 2).sum(axis=1) <= sq_radii
        out[i] = np.bincount(rep_index[hit], minlength=replications) > 0
    return out


def configuration_probability_mc(
    foreground,
    background,
    model: BallModelParams,
    replications: int,
    seed: int,
) -> MCEstimate:
    """Probability that grains cover all foreground and no background points.

    Each replication samples the germs of an independent model restricted
    to a box that contains every grain able to touch the test points, so
    the event is evaluated under the exact stationary distribution.
    """
    fg = np.asarray(foreground, dtype=float).reshape(-1, 3)
    bg = np.asarray(background, dtype=float).reshape(-1, 3)
    if len(fg) + len(bg) == 0:
        raise ValueError("need at least one test point")
    if replications <= 0:
        raise ValueError(f"replications must be positive, got {replications}")
    pts = np.concatenate([fg, bg])
    margin = model.radius.upper
    lo = pts.min(axis=0) - margin
    hi = pts.max(axis=0) + margin
    volume = float(np.prod(hi - lo))
    rate = model.intensity * volume

    hits = 0
    done = 0
    n_batches = -(-replications // BATCH_SIZE)
    for rng in _child_generators(seed, n_batches):
        m = min(BATCH_SIZE, replications - done)
        counts = rng.poisson(rate, BATCH_SIZE)[:m]
        total = int(counts.sum())
        rep_index = np.repeat(np.arange(m), counts)
        centers = rng.uniform(lo, hi, size=(total, 3))
        sq_radii = model.radius.sample(rng, total) ** 2
        cover = _coverage_by_replication(pts, centers, sq_radii, rep_index, m)
        ok = np.ones(m, dtype=bool)
        if len(fg):
            ok &= cover[: len(fg)].all(axis=0)
        if len(bg):
            ok &= ~cover[len(fg) :].any(axis=0)
        hits += int(ok.sum())
        done += m
    p = hits / replications
    se = math.sqrt(p * (1.0 - p) / replications)
    return MCEstimate(p, se, replications)


def miss_probability_mc(
    points,
    model: BallModelParams,
    samples: int,
    seed: int,
) -> MCEstimate:
    """Void probability of a finite point set via the volume route.

    Estimates E V_3(union of balls at the points) by uniform volume
    sampling, drawing a fresh radius per sample point, and maps it
    through the void formula.  The standard error is propagated through
    the exponential.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if len(pts) == 0:
        raise ValueError("need at least one test point")
    if samples <= 0:
        raise ValueError(f"samples must be positive, got {samples}")
    margin = model.radius.upper
    lo = pts.min(axis=0) - margin
    hi = pts.max(axis=0) + margin
    box = float(np.prod(hi - lo))

    inside = 0
    done = 0
    n_batches = -(-samples // BATCH_SIZE)
    for rng in _child_generators(seed, n_batches):
        m = min(BATCH_SIZE, samples - done)
        x = rng.uniform(lo, hi, size=(BATCH_SIZE, 3))[:m]
        r2 = (model.radius.sample(rng, BATCH_SIZE)[:m]) ** 2
        d2 = ((x[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        inside += int((d2.min(axis=1) <= r2).sum())
        done += m
    frac = inside / samples
    mean_volume = box * frac
    se_volume = box * math.sqrt(frac * (1.0 - frac) / samples)
    p = math.exp(-model.intensity * mean_volume)
    return MCEstimate(p, p * model.intensity * se_volume, samples)
