"""Coordinate charts of C^2 minus the origin.

Three charts are supported:

* Cartesian ``(x, y, u, v)`` with ``alpha = x + iy`` and ``beta = u + iv``;
* double polar ``(r, rho, phi, theta)`` with ``r = |alpha|``, ``rho = |beta|``;
* Hopf hyperspherical ``(l, psi, phi, theta)`` with ``r = l cos(psi)`` and
  ``rho = l sin(psi)``.

Angles are stored in ``[0, 2*pi)``. When a radius vanishes its angle is
undetermined and is reported as 0.

Scalar functions operate on the frozen point classes. The ``*_array``
variants take ``(n, 4)`` arrays and are what the samplers and statistics use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroVector

__all__ = [
    "CartesianPoint",
    "DoublePolarPoint",
    "HopfPoint",
    "eta",
    "from_double_polar",
    "to_double_polar",
    "from_hopf",
    "to_hopf",
    "jacobian_double_polar",
    "jacobian_hopf",
    "eta_array",
    "from_hopf_array",
    "to_hopf_array",
    "radii_array",
]

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class CartesianPoint:
    x: float
    y: float
    u: float
    v: float

    def __post_init__(self):
        for name in ("x", "y", "u", "v"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_complex(cls, alpha: complex, beta: complex) -> CartesianPoint:
        return cls(alpha.real, alpha.imag, beta.real, beta.imag)

    @property
    def alpha(self) -> complex:
        return complex(self.x, self.y)

    @property
    def beta(self) -> complex:
        return complex(self.u, self.v)

    def norm(self) -> float:
        # hypot scales internally, so |fields| up to ~1e300 do not overflow
        return math.hypot(self.x, self.y, self.u, self.v)

    def is_origin(self) -> bool:
        return self.x == 0.0 and self.y == 0.0 and self.u == 0.0 and self.v == 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.u, self.v])

    def __iter__(self):
        return iter((self.x, self.y, self.u, self.v))


@dataclass(frozen=True)
class DoublePolarPoint:
    r: float
    rho: float
    phi: float
    theta: float

    def __post_init__(self):
        if not (self.r >= 0.0 and self.rho >= 0.0):
            raise ValueError("radii must be nonnegative")
        if self.r == 0.0 and self.rho == 0.0:
            raise ZeroVector("double polar point with r = rho = 0")
        _check_angle("phi", self.phi)
        _check_angle("theta", self.theta)


@dataclass(frozen=True)
class HopfPoint:
    l: float  # noqa: E741
    psi: float
    phi: float
    theta: float

    def __post_init__(self):
        if not self.l > 0.0:
            raise ValueError(f"l must be positive, got {self.l!r}")
        if not 0.0 <= self.psi <= HALF_PI:
            raise ValueError(f"psi must lie in [0, pi/2], got {self.psi!r}")
        _check_angle("phi", self.phi)
        _check_angle("theta", self.theta)


def _check_angle(name: str, value: float) -> None:
    if not 0.0 <= value < TWO_PI:
        raise ValueError(f"{name} must lie in [0, 2*pi), got {value!r}")


def eta(y: float, x: float) -> float:
    """Angle of ``(x, y)`` in ``[0, 2*pi)``; ``eta(0, 0) == 0``."""
    angle = math.atan2(y, x)
    if angle < 0.0:
        angle += TWO_PI
        # -tiny + 2*pi can round up to 2*pi itself
        if angle >= TWO_PI:
            angle = 0.0
    return angle + 0.0


def from_double_polar(p: DoublePolarPoint) -> CartesianPoint:
    return CartesianPoint(
        p.r * math.cos(p.phi),
        p.r * math.sin(p.phi),
        p.rho * math.cos(p.theta),
        p.rho * math.sin(p.theta),
    )


def to_double_polar(w: CartesianPoint) -> DoublePolarPoint:
    if w.is_origin():
        raise ZeroVector("the origin has no double polar coordinates")
    return DoublePolarPoint(
        math.hypot(w.x, w.y),
        math.hypot(w.u, w.v),
        eta(w.y, w.x),
        eta(w.v, w.u),
    )


def from_hopf(h: HopfPoint) -> CartesianPoint:
    r = h.l * math.cos(h.psi)
    rho = h.l * math.sin(h.psi)
    return CartesianPoint(
        r * math.cos(h.phi),
        r * math.sin(h.phi),
        rho * math.cos(h.theta),
        rho * math.sin(h.theta),
    )


def to_hopf(w: CartesianPoint) -> HopfPoint:
    """Hopf coordinates of a nonzero point.

    ``psi`` comes from ``atan2(|beta|, |alpha|)``, which gives exactly
    ``pi/2`` when ``alpha = 0`` and never divides.
    """
    if w.is_origin():
        raise ZeroVector("the origin has no Hopf coordinates")
    r = math.hypot(w.x, w.y)
    rho = math.hypot(w.u, w.v)
    return HopfPoint(w.norm(), math.atan2(rho, r), eta(w.y, w.x), eta(w.v, w.u))


def jacobian_double_polar(p: DoublePolarPoint) -> float:
    """Volume factor ``r * rho`` of the double polar chart."""
    return p.r * p.rho


def jacobian_hopf(h: HopfPoint) -> float:
    """Volume factor ``l**3 * sin(2 psi) / 2`` of the Hopf chart."""
    return 0.5 * h.l**3 * math.sin(2.0 * h.psi)


# -- array versions ---------------------------------------------------------


def eta_array(y, x) -> np.ndarray:
    angle = np.arctan2(y, x)
    angle = np.where(angle < 0.0, angle + TWO_PI, angle)
    angle = np.where(angle >= TWO_PI, 0.0, angle)
    return angle + 0.0


def radii_array(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(|alpha|, |beta|)`` for every row of an ``(n, 4)`` array."""
    pts = np.asarray(points, dtype=float)
    return np.hypot(pts[:, 0], pts[:, 1]), np.hypot(pts[:, 2], pts[:, 3])


def to_hopf_array(points: np.ndarray) -> tuple[np.ndarray, ...]:
    """Return ``(l, psi, phi, theta)`` arrays for an ``(n, 4)`` point array.

    Rows at the origin raise :class:`ZeroVector`.
    """
    pts = np.asarray(points, dtype=float)
    r, rho = radii_array(pts)
    length = np.hypot(r, rho)
    if np.any(length == 0.0):
        raise ZeroVector("point array contains the origin")
    return (
        length,
        np.arctan2(rho, r),
        eta_array(pts[:, 1], pts[:, 0]),
        eta_array(pts[:, 3], pts[:, 2]),
    )


def from_hopf_array(length, psi, phi, theta) -> np.ndarray:
    """Stack Hopf coordinate arrays into an ``(n, 4)`` Cartesian array."""
    r = length * np.cos(psi)
    rho = length * np.sin(psi)
    return np.column_stack(
        (r * np.cos(phi), r * np.sin(phi), rho * np.cos(theta), rho * np.sin(theta))
    )
