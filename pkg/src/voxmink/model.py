"""Parameters of stationary Boolean models with spherical grains.

A model is a stationary Poisson process of germs with intensity gamma,
each germ carrying an independent ball of random radius.  Radius laws
are restricted to ones with bounded support and closed-form moments, so
every expansion coefficient downstream is exact in the moments E r,
E r^2, E r^3; nothing in the pipeline estimates a moment numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ConstantRadius:
    """Every grain has the same radius."""

    radius: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"radius must be finite and positive, got {self.radius}")

    def moment(self, k: int) -> float:
        return self.radius**k

    @property
    def upper(self) -> float:
        return self.radius

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.full(n, self.radius)

    def describe(self) -> str:
        return f"const:{self.radius:g}"


@dataclass(frozen=True)
class UniformRadius:
    """Radius drawn uniformly from [low, high]."""

    low: float
    high: float

    def __post_init__(self) -> None:
        ok = (
            math.isfinite(self.low)
            and math.isfinite(self.high)
            and 0 < self.low < self.high
        )
        if not ok:
            raise ValueError(
                f"need 0 < low < high with finite bounds, got [{self.low}, {self.high}]"
                " (use ConstantRadius for a degenerate law)"
            )

    def moment(self, k: int) -> float:
        return (self.high ** (k + 1) - self.low ** (k + 1)) / (
            (k + 1) * (self.high - self.low)
        )

    @property
    def upper(self) -> float:
        return self.high

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.low, self.high, n)

    def describe(self) -> str:
        return f"unif:{self.low:g}:{self.high:g}"


RadiusLaw = ConstantRadius | UniformRadius


def parse_radius_law(text: str) -> RadiusLaw:
    """Parse 'const:R' or 'unif:LO:HI' into a radius law."""
    parts = text.split(":")
    try:
        if parts[0] == "const" and len(parts) == 2:
            return ConstantRadius(float(parts[1]))
        if parts[0] == "unif" and len(parts) == 3:
            return UniformRadius(float(parts[1]), float(parts[2]))
    except ValueError as exc:
        raise ValueError(f"bad radius law {text!r}: {exc}") from None
    raise ValueError(f"bad radius law {text!r}: expected 'const:R' or 'unif:LO:HI'")


@dataclass(frozen=True)
class BallModelParams:
    """Intensity and radius law of a Boolean model with ball grains."""

    intensity: float
    radius: RadiusLaw

    def __post_init__(self) -> None:
        if not (math.isfinite(self.intensity) and self.intensity >= 0):
            raise ValueError(
                f"intensity must be finite and nonnegative, got {self.intensity}"
            )

    def mean_grain_volumes(self) -> tuple[float, float, float, float]:
        """(E V_0, E V_1, E V_2, E V_3) of the typical grain.

        For a ball of radius r these are 1, 4 r, 2 pi r^2, (4/3) pi r^3,
        so the means are exact in the radius moments.
        """
        m1, m2, m3 = (self.radius.moment(k) for k in (1, 2, 3))
        return (1.0, 4.0 * m1, 2.0 * math.pi * m2, 4.0 * math.pi * m3 / 3.0)

    def describe(self) -> str:
        return f"gamma={self.intensity:g} radius={self.radius.describe()}"
