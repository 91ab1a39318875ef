"""Closed-form probabilities under SU(2)-invariant measures.

In Hopf coordinates an invariant probability measure factorizes as
``(1/2) l^3 f(l) sin(2 psi) dl dpsi dphi dtheta``. Sets that constrain only
``psi`` (cones, dilation invariant) therefore get the same probability from
every profile, namely the integral of ``sin(2 psi)``, i.e. a difference of
``sin^2`` values. Sets that constrain only ``l`` (shells) get the CDF of
``|W|``, which does depend on the profile.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass

from .errors import BothZero
from .radial import NormalizedProfile, RadialProfile, normalize

__all__ = [
    "AngleSet",
    "RadiusSet",
    "InvariantMeasure",
    "cone_measure",
    "shell_measure",
    "ball_measure",
    "product_measure",
    "chain_probability",
    "born_probability",
]

HALF_PI = 0.5 * math.pi


def _validated(intervals: Iterable[tuple[float, float]], lo_bound: float, hi_bound: float, what: str):
    out = []
    for pair in intervals:
        lo, hi = (float(v) for v in pair)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError(f"{what} interval contains NaN")
        if not lo_bound <= lo <= hi <= hi_bound:
            raise ValueError(f"{what} interval [{lo!r}, {hi!r}] outside [{lo_bound!r}, {hi_bound!r}]")
        out.append((lo, hi))
    out.sort()
    for (_, prev_hi), (lo, _) in zip(out, out[1:]):
        if lo < prev_hi:
            raise ValueError(f"{what} intervals overlap")
    return tuple(out)


@dataclass(frozen=True)
class AngleSet:
    """Finite union of disjoint closed intervals inside ``[0, pi/2]``."""

    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "intervals", _validated(self.intervals, 0.0, HALF_PI, "angle"))

    @classmethod
    def interval(cls, lo: float, hi: float) -> AngleSet:
        return cls(((lo, hi),))

    @classmethod
    def full(cls) -> AngleSet:
        return cls(((0.0, HALF_PI),))


@dataclass(frozen=True)
class RadiusSet:
    """Finite union of disjoint closed intervals inside ``[0, inf]``."""

    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "intervals", _validated(self.intervals, 0.0, math.inf, "radius"))

    @classmethod
    def interval(cls, lo: float, hi: float) -> RadiusSet:
        return cls(((lo, hi),))

    @classmethod
    def full(cls) -> RadiusSet:
        return cls(((0.0, math.inf),))


class InvariantMeasure:
    """SU(2)-invariant probability measure with a normalized radial profile."""

    def __init__(self, profile: NormalizedProfile | RadialProfile):
        if isinstance(profile, RadialProfile):
            profile = normalize(profile)
        self.profile = profile

    def __repr__(self):
        return f"InvariantMeasure({self.profile.label()})"

    def label(self) -> str:
        return self.profile.label()

    def total_mass(self) -> float:
        return shell_measure(self, RadiusSet.full())


def cone_measure(m: InvariantMeasure | None, psi_set: AngleSet) -> float:
    """Probability of the cone ``{w : atan(|beta| / |alpha|) in psi_set}``.

    Equals ``sum(sin^2 hi - sin^2 lo)`` over the intervals. The measure
    argument is accepted for symmetry with the other evaluators and is never
    read: the value is the same for every invariant probability measure.
    """
    return math.fsum(math.sin(hi) ** 2 - math.sin(lo) ** 2 for lo, hi in psi_set.intervals)


def shell_measure(m: InvariantMeasure, l_set: RadiusSet) -> float:
    """Probability that ``|W|`` falls in ``l_set``."""
    cdf = m.profile.cdf
    return math.fsum(cdf(hi) - cdf(lo) for lo, hi in l_set.intervals)


def ball_measure(m: InvariantMeasure, radius: float) -> float:
    """Probability of the closed ball of the given radius around the origin."""
    return shell_measure(m, RadiusSet.interval(0.0, radius))


def product_measure(m: InvariantMeasure, l_set: RadiusSet, psi_set: AngleSet) -> float:
    return shell_measure(m, l_set) * cone_measure(m, psi_set)


def chain_probability(t: float) -> float:
    """``P[|beta| <= t |alpha|] = t^2 / (1 + t^2)`` for any invariant measure."""
    if not (math.isfinite(t) and t >= 0.0):
        raise ValueError(f"t must be finite and nonnegative, got {t!r}")
    if t > 1.0:
        # same value, without overflowing t^2
        inv = 1.0 / t
        return 1.0 / (1.0 + inv * inv)
    return t * t / (1.0 + t * t)


def born_probability(a_mag: float, b_mag: float) -> float:
    """``P[a |alpha| >= b |beta|] = a^2 / (a^2 + b^2)``.

    Raises:
        BothZero: If both magnitudes vanish.
    """
    if not (a_mag >= 0.0 and b_mag >= 0.0):
        raise ValueError("amplitude magnitudes must be nonnegative")
    if a_mag == 0.0 and b_mag == 0.0:
        raise BothZero("a and b are both zero")
    if b_mag == 0.0:
        return 1.0
    return chain_probability(a_mag / b_mag)
