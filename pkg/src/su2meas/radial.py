"""Radial profiles of SU(2)-invariant measures.

An invariant measure on C^2 with a density has density ``f(|w|)`` for a
nonnegative profile ``f`` on ``[0, inf)``. It is finite iff the third moment
``M3(f) = int_0^inf l^3 f(l) dl`` is finite, and it is a probability measure
iff ``M3(f) = 1 / (2 pi^2)``. The norm ``|W|`` of a sample then has density
``2 pi^2 l^3 f(l)``.

Builtin kinds carry closed forms for the partial third moment. Tabulated
profiles are integrated exactly piece by piece; arbitrary callables fall
back on adaptive quadrature.
"""

from __future__ import annotations

import csv
import math
import os
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .errors import DivergentMoment, ProfileFormatError, ZeroMass

__all__ = [
    "NORMALIZED_M3",
    "RadialProfile",
    "GaussianProfile",
    "ExponentialProfile",
    "BallUniformProfile",
    "TabulatedProfile",
    "CallableProfile",
    "NormalizedProfile",
    "third_moment",
    "moment",
    "normalize",
    "abs_density",
    "abs_cdf",
    "abs_quantile",
    "load_tabulated",
    "parse_profile",
]

TWO_PI_SQ = 2.0 * math.pi**2
NORMALIZED_M3 = 1.0 / TWO_PI_SQ
GAUSSIAN_AMPLITUDE = 1.0 / (4.0 * math.pi**2)

_TABLE_SIZE = 200


class RadialProfile:
    """Base class for nonnegative radial profiles ``f: [0, inf) -> [0, inf)``.

    Subclasses implement ``__call__`` (vectorized), ``scaled`` and, where a
    closed form exists, ``_analytic_m3`` and ``_partial_m3``.
    """

    kind = "abstract"
    support_end = math.inf

    def __call__(self, l):  # noqa: E741
        raise NotImplementedError

    def scaled(self, factor: float) -> RadialProfile:
        raise NotImplementedError

    def __mul__(self, factor: float) -> RadialProfile:
        return self.scaled(float(factor))

    __rmul__ = __mul__

    def breakpoints(self) -> tuple[float, ...]:
        """Points where ``f`` may fail to be smooth."""
        return ()

    def label(self) -> str:
        return self.kind

    def _analytic_m3(self) -> float | None:
        return None

    def _partial_m3(self, l):  # noqa: E741
        """``int_0^l q^3 f(q) dq`` in closed form, vectorized over ``l``."""
        raise NotImplementedError

    @property
    def has_closed_form(self) -> bool:
        return self._analytic_m3() is not None


@dataclass(frozen=True)
class GaussianProfile(RadialProfile):
    """``amplitude * exp(-l^2 / 2)``.

    The default amplitude ``1 / (4 pi^2)`` is the profile of four independent
    standard normals, which is already normalized.
    """

    amplitude: float = GAUSSIAN_AMPLITUDE
    kind = "gaussian"

    def __post_init__(self):
        _check_amplitude(self.amplitude)

    def __call__(self, l):  # noqa: E741
        return self.amplitude * np.exp(-0.5 * np.square(l))

    def scaled(self, factor):
        return GaussianProfile(self.amplitude * factor)

    def _analytic_m3(self):
        return 2.0 * self.amplitude

    def _partial_m3(self, l):  # noqa: E741
        # int_0^l q^3 e^{-q^2/2} dq = 2 [1 - (1 + x) e^{-x}], x = l^2/2
        x = np.minimum(0.5 * np.square(l), 1e4)
        return 2.0 * self.amplitude * (-np.expm1(-x) - x * np.exp(-x))


@dataclass(frozen=True)
class ExponentialProfile(RadialProfile):
    """``amplitude * exp(-rate * l)``."""

    rate: float = 1.0
    amplitude: float = 1.0
    kind = "exponential"

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0.0):
            raise ValueError(f"rate must be positive, got {self.rate!r}")
        _check_amplitude(self.amplitude)

    def __call__(self, l):  # noqa: E741
        return self.amplitude * np.exp(-self.rate * np.asarray(l, dtype=float))

    def scaled(self, factor):
        return ExponentialProfile(self.rate, self.amplitude * factor)

    def label(self):
        return f"exponential:{self.rate!r}"

    def _analytic_m3(self):
        return 6.0 * self.amplitude / self.rate**4

    def _partial_m3(self, l):  # noqa: E741
        # 1 - e^{-x} (1 + x + x^2/2 + x^3/6), x = rate * l
        x = np.minimum(self.rate * np.asarray(l, dtype=float), 1e4)
        tail = np.exp(-x) * (x * (1.0 + x * (0.5 + x / 6.0)))
        return self._analytic_m3() * np.clip(-np.expm1(-x) - tail, 0.0, 1.0)


@dataclass(frozen=True)
class BallUniformProfile(RadialProfile):
    """``amplitude`` on ``[0, radius]`` and zero beyond."""

    radius: float = 1.0
    amplitude: float = 1.0
    kind = "ball"

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0.0):
            raise ValueError(f"radius must be positive, got {self.radius!r}")
        _check_amplitude(self.amplitude)

    @property
    def support_end(self):
        return self.radius

    def __call__(self, l):  # noqa: E741
        l = np.asarray(l, dtype=float)  # noqa: E741
        return np.where((l >= 0.0) & (l <= self.radius), self.amplitude, 0.0)

    def scaled(self, factor):
        return BallUniformProfile(self.radius, self.amplitude * factor)

    def breakpoints(self):
        return (self.radius,)

    def label(self):
        return f"ball:{self.radius!r}"

    def _analytic_m3(self):
        return self.amplitude * self.radius**4 / 4.0

    def _partial_m3(self, l):  # noqa: E741
        frac = np.clip(np.asarray(l, dtype=float) / self.radius, 0.0, 1.0)
        return self._analytic_m3() * frac**4


class TabulatedProfile(RadialProfile):
    """Piecewise-linear profile through ``(grid[i], values[i])``.

    The profile is zero outside ``[grid[0], grid[-1]]``. Linear interpolation
    never overshoots the data, so nonnegative values stay nonnegative.
    """

    kind = "tabulated"

    def __init__(self, grid: Sequence[float], values: Sequence[float], source: str | None = None):
        grid = np.array(grid, dtype=float)
        values = np.array(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if grid.size < 2:
            raise ValueError("a tabulated profile needs at least two points")
        if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(values))):
            raise ValueError("grid and values must be finite")
        if grid[0] < 0.0:
            raise ValueError("grid must be nonnegative")
        if np.any(np.diff(grid) <= 0.0):
            raise ValueError("grid must be strictly ascending")
        if np.any(values < 0.0):
            raise ValueError("profile values must be nonnegative")
        grid.setflags(write=False)
        values.setflags(write=False)
        self.grid = grid
        self.values = values
        self.source = source
        self._cum = np.concatenate(([0.0], np.cumsum(self._segment_m3(np.arange(grid.size - 1), np.diff(grid)))))

    def __repr__(self):
        return f"TabulatedProfile(n={self.grid.size}, end={self.grid[-1]!r})"

    def __eq__(self, other):
        return (
            isinstance(other, TabulatedProfile)
            and np.array_equal(self.grid, other.grid)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    @property
    def support_end(self):
        return float(self.grid[-1])

    def __call__(self, l):  # noqa: E741
        return np.interp(l, self.grid, self.values, left=0.0, right=0.0)

    def scaled(self, factor):
        return TabulatedProfile(self.grid, self.values * factor, self.source)

    def breakpoints(self):
        return tuple(self.grid.tolist())

    def label(self):
        return f"tabulated:{self.source}" if self.source else "tabulated"

    def _segment_coeffs(self, idx):
        """Coefficients of ``int_0^h (a + t)^3 (fa + s t) dt`` as a polynomial in ``h``."""
        a = self.grid[idx]
        fa = self.values[idx]
        s = (self.values[idx + 1] - fa) / (self.grid[idx + 1] - a)
        return (
            fa * a**3,
            (3.0 * a**2 * fa + s * a**3) / 2.0,
            a * fa + a**2 * s,
            (fa + 3.0 * a * s) / 4.0,
            s / 5.0,
        )

    @staticmethod
    def _poly_m3(c1, c2, c3, c4, c5, h):
        return h * (c1 + h * (c2 + h * (c3 + h * (c4 + h * c5))))

    def _segment_m3(self, idx, h):
        return self._poly_m3(*self._segment_coeffs(idx), h)

    def _analytic_m3(self):
        return float(self._cum[-1])

    def _partial_m3(self, l):  # noqa: E741
        l = np.asarray(l, dtype=float)  # noqa: E741
        idx = np.clip(np.searchsorted(self.grid, l, side="right") - 1, 0, self.grid.size - 2)
        h = np.clip(l - self.grid[idx], 0.0, self.grid[idx + 1] - self.grid[idx])
        part = self._cum[idx] + self._segment_m3(idx, h)
        return np.clip(part, 0.0, self._cum[-1])


@dataclass(frozen=True, eq=False)
class CallableProfile(RadialProfile):
    """Profile given by an arbitrary scalar function; moments by quadrature.

    The third moment is resolved at construction, so a non-integrable tail
    raises :class:`DivergentMoment` immediately.
    """

    func: Callable[[float], float]
    support: float = math.inf
    kinks: tuple[float, ...] = ()
    name: str = "callable"
    kind = "callable"
    _m3: float = field(init=False, repr=False, default=0.0)

    def __post_init__(self):
        object.__setattr__(self, "_m3", _quadrature_m3(self))

    @property
    def support_end(self):
        return self.support

    def __call__(self, l):  # noqa: E741
        if np.ndim(l) == 0:
            value = float(self.func(float(l))) if 0.0 <= l <= self.support else 0.0
            if value < 0.0:
                raise ValueError(f"profile is negative at l={float(l)!r}")
            return value
        return np.array([self(x) for x in np.ravel(l)]).reshape(np.shape(l))

    def scaled(self, factor):
        func = self.func
        return CallableProfile(lambda x: factor * func(x), self.support, self.kinks, self.name)

    def breakpoints(self):
        return self.kinks

    def label(self):
        return self.name


def _check_amplitude(amplitude: float) -> None:
    if not (math.isfinite(amplitude) and amplitude >= 0.0):
        raise ValueError(f"amplitude must be finite and nonnegative, got {amplitude!r}")


def _moment_integrand(f: RadialProfile, k: int):
    return lambda l: l**k * float(f(l))  # noqa: E741


def _moment_by_quadrature(f: RadialProfile, k: int) -> float:
    g = _moment_integrand(f, k)
    try:
        if math.isfinite(f.support_end):
            pts = [0.0, *(b for b in f.breakpoints() if 0.0 < b < f.support_end), f.support_end]
            return quadrature.integrate_piecewise(g, pts)
        return quadrature.integrate_to_infinity(g, 0.0, breakpoints=f.breakpoints())
    except quadrature.QuadratureError as exc:
        raise DivergentMoment(f"moment {k} of {f.label()} did not converge: {exc}") from exc


def _quadrature_m3(f: RadialProfile) -> float:
    return _moment_by_quadrature(f, 3)


def truncation_radius(f: RadialProfile) -> float:
    """Radius beyond which the profile carries no mass at working precision.

    The smallest of the support end and the first doubling-grid point where
    ``l^3 f(l)`` falls below 1e-16 of the running third moment.
    """
    if math.isfinite(f.support_end):
        return float(f.support_end)
    try:
        end, _ = quadrature.truncation_point(_moment_integrand(f, 3), breakpoints=f.breakpoints())
    except quadrature.QuadratureError as exc:
        raise DivergentMoment(f"tail of {f.label()} is not integrable: {exc}") from exc
    return end


def third_moment(f: RadialProfile, method: str = "auto") -> float:
    """``int_0^inf l^3 f(l) dl``.

    ``method`` is ``"analytic"`` (closed form, error for callables),
    ``"quadrature"`` (adaptive Simpson, any kind) or ``"auto"`` (closed form
    when available).
    """
    if method not in ("auto", "analytic", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if method != "quadrature":
        value = f._analytic_m3()
        if value is not None:
            return value
        if method == "analytic":
            raise ValueError(f"{f.label()} has no closed-form third moment")
        if isinstance(f, CallableProfile):
            return f._m3
    return _quadrature_m3(f)


def moment(f: RadialProfile, k: int) -> float:
    """Moment ``int_0^inf l^k f(l) dl`` for ``k`` in 0..3 (quadrature for k < 3)."""
    if k not in (0, 1, 2, 3):
        raise ValueError("only moments 0 to 3 are available")
    if k == 3:
        return third_moment(f)
    return _moment_by_quadrature(f, k)


class NormalizedProfile:
    """A profile rescaled so its third moment is ``1 / (2 pi^2)``.

    The CDF of ``|W|`` is tabulated at 200 nodes on construction; the table
    brackets quantile searches.
    """

    def __init__(self, profile: RadialProfile):
        m3 = third_moment(profile)
        if not math.isfinite(m3):
            raise DivergentMoment(f"third moment of {profile.label()} is {m3!r}")
        if m3 <= 0.0:
            raise ZeroMass(f"{profile.label()} has zero third moment")
        self.profile = profile
        self.raw_m3 = m3
        self.scale = 1.0 / (TWO_PI_SQ * m3)
        self.l_max = truncation_radius(profile)
        self._nodes = np.linspace(0.0, self.l_max, _TABLE_SIZE)
        if profile.has_closed_form:
            self._node_partial = profile._partial_m3(self._nodes)
        else:
            g = _moment_integrand(profile, 3)
            kinks = profile.breakpoints()
            pieces = [
                quadrature.integrate_piecewise(g, [a, *(k for k in kinks if a < k < b), b], scale=m3)
                for a, b in zip(self._nodes[:-1], self._nodes[1:])
            ]
            self._node_partial = np.concatenate(([0.0], np.cumsum(pieces)))
        self._node_cdf = np.clip(self._node_partial / m3, 0.0, 1.0)
        self._node_cdf[0] = 0.0

    def __repr__(self):
        return f"NormalizedProfile({self.profile!r}, scale={self.scale!r})"

    def label(self) -> str:
        return self.profile.label()

    def as_profile(self) -> RadialProfile:
        return self.profile.scaled(self.scale)

    def density(self, l):  # noqa: E741
        """The normalized profile ``scale * f(l)``."""
        return self.scale * self.profile(l)

    def _raw_partial(self, l):  # noqa: E741
        l = np.asarray(l, dtype=float)  # noqa: E741
        if self.profile.has_closed_form:
            return self.profile._partial_m3(l)
        return np.vectorize(self._callable_partial, otypes=[float])(l)

    def _callable_partial(self, l):  # noqa: E741
        if l <= 0.0:
            return 0.0
        nodes = self._nodes
        k = int(np.clip(np.searchsorted(nodes, l, side="right") - 1, 0, nodes.size - 1))
        start = float(nodes[k])
        if l == start:
            return float(self._node_partial[k])
        kinks = [b for b in self.profile.breakpoints() if start < b < l]
        return float(self._node_partial[k]) + quadrature.integrate_piecewise(
            _moment_integrand(self.profile, 3), [start, *kinks, l], scale=self.raw_m3
        )

    def cdf(self, l):  # noqa: E741
        l = np.asarray(l, dtype=float)  # noqa: E741
        capped = np.minimum(l, self.l_max) if not self.profile.has_closed_form else l
        out = np.clip(self._raw_partial(np.maximum(capped, 0.0)) / self.raw_m3, 0.0, 1.0)
        out = np.where(l <= 0.0, 0.0, out)
        return out if out.ndim else float(out)

    def abs_density(self, l):  # noqa: E741
        l = np.asarray(l, dtype=float)  # noqa: E741
        out = TWO_PI_SQ * l**3 * self.density(l)
        out = np.where(l < 0.0, 0.0, out)
        return out if out.ndim else float(out)

    def quantile(self, u):
        """Inverse of :meth:`cdf` by bisection inside table brackets."""
        u = np.asarray(u, dtype=float)
        if np.any((u < 0.0) | (u >= 1.0)):
            raise ValueError("quantile level must lie in [0, 1)")
        flat = np.ravel(u)
        if not self.profile.has_closed_form:
            out = np.array([self._bisect(np.array([x]))[0] for x in flat])
        else:
            out = self._bisect(flat)
        out = np.where(flat == 0.0, 0.0, out).reshape(u.shape)
        return out if out.ndim else float(out)

    def _bisect(self, u: np.ndarray) -> np.ndarray:
        if isinstance(self.profile, TabulatedProfile):
            return self._bisect_tabulated(u)
        table = self._node_cdf
        k = np.clip(np.searchsorted(table, u, side="right") - 1, 0, table.size - 2)
        lo = self._nodes[k].copy()
        hi = self._nodes[k + 1].copy()
        # above the last node: expand until the bracket holds u
        beyond = u >= table[-1]
        if np.any(beyond):
            lo[beyond] = self.l_max
            hi[beyond] = 2.0 * self.l_max
            for _ in range(1100):
                short = beyond & (self.cdf(hi) <= u)
                if not np.any(short):
                    break
                lo[short] = hi[short]
                hi[short] *= 2.0
        width_tol = 4.0 * np.spacing(self.l_max)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all(hi - lo <= width_tol):
                break
        return hi


    def _bisect_tabulated(self, u: np.ndarray) -> np.ndarray:
        # the grid brackets every level; bisect the in-segment polynomial only
        prof = self.profile
        target = u * self.raw_m3
        cum = prof._cum
        k = np.clip(np.searchsorted(cum, target, side="right") - 1, 0, prof.grid.size - 2)
        rest = target - cum[k]
        lo = np.zeros_like(u)
        hi = prof.grid[k + 1] - prof.grid[k]
        coeffs = prof._segment_coeffs(k)
        width_tol = 4.0 * np.spacing(self.l_max)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = prof._poly_m3(*coeffs, mid) < rest
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all(hi - lo <= width_tol):
                break
        return prof.grid[k] + hi


def normalize(f: RadialProfile) -> NormalizedProfile:
    return NormalizedProfile(f)


def abs_density(nf: NormalizedProfile, l):  # noqa: E741
    """Density ``2 pi^2 l^3 f(l)`` of ``|W|``."""
    return nf.abs_density(l)


def abs_cdf(nf: NormalizedProfile, l):  # noqa: E741
    """``P[|W| < l]``."""
    return nf.cdf(l)


def abs_quantile(nf: NormalizedProfile, u):
    return nf.quantile(u)


def load_tabulated(path: str | os.PathLike) -> TabulatedProfile:
    """Read a two-column ``l,f`` CSV profile.

    A header row is allowed on the first non-blank line. Rows must be
    ascending in ``l`` with nonnegative ``f``; at least two rows are needed.

    Raises:
        ProfileFormatError: With the offending line number.
        OSError: If the file cannot be read.
    """
    grid: list[float] = []
    values: list[float] = []
    seen_content = False
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise ProfileFormatError(f"expected 2 columns, found {len(row)}", lineno)
            try:
                l_val, f_val = float(row[0]), float(row[1])
            except ValueError:
                if not seen_content:
                    seen_content = True
                    continue
                raise ProfileFormatError(f"non-numeric row {row!r}", lineno) from None
            seen_content = True
            if not (math.isfinite(l_val) and math.isfinite(f_val)):
                raise ProfileFormatError("values must be finite", lineno)
            if l_val < 0.0:
                raise ProfileFormatError(f"radius {l_val!r} is negative", lineno)
            if f_val < 0.0:
                raise ProfileFormatError(f"profile value {f_val!r} is negative", lineno)
            if grid and l_val <= grid[-1]:
                raise ProfileFormatError(f"radius {l_val!r} is not ascending", lineno)
            grid.append(l_val)
            values.append(f_val)
    if len(grid) < 2:
        raise ProfileFormatError(f"need at least 2 data rows, found {len(grid)}")
    return TabulatedProfile(grid, values, source=os.fspath(path))


def parse_profile(text: str) -> RadialProfile:
    """Build a profile from ``gaussian``, ``exponential:<rate>``, ``ball:<R>``
    or ``tabulated:<path>``."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind == "gaussian" and not arg:
        return GaussianProfile()
    if kind == "tabulated" and arg:
        return load_tabulated(arg)
    if kind in ("exponential", "ball"):
        try:
            value = float(arg) if arg else 1.0
        except ValueError:
            raise ValueError(f"bad parameter in profile {text!r}") from None
        return ExponentialProfile(rate=value) if kind == "exponential" else BallUniformProfile(radius=value)
    raise ValueError(
        f"unknown profile {text!r}; use gaussian, exponential:<rate>, ball:<R> or tabulated:<path>"
    )
