"""Adaptive composite Simpson quadrature.

Intervals are bisected until the local Richardson error estimate drops
below ``rel_tol`` times a global estimate of the integral. Semi-infinite
integrals are truncated on a doubling grid once both the integrand and the
contribution of the last doubling segment are negligible.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable

__all__ = [
    "QuadratureError",
    "integrate",
    "integrate_piecewise",
    "integrate_to_infinity",
    "truncation_point",
]

MAX_LEVELS = 60
_INITIAL_PANELS = 16


class QuadratureError(ArithmeticError):
    """Raised when adaptive refinement hits the level cap or the tail never decays."""


def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
    return h / 6.0 * (fa + 4.0 * fm + fb)


def _global_estimate(f: Callable[[float], float], a: float, b: float) -> float:
    # composite Simpson on 64 panels, used only to scale the tolerance
    n = 64
    h = (b - a) / n
    total = f(a) + f(b)
    for i in range(1, n):
        total += (4.0 if i % 2 else 2.0) * f(a + i * h)
    return total * h / 3.0


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-12,
    max_levels: int = MAX_LEVELS,
    scale: float | None = None,
) -> float:
    """Integrate ``f`` over the finite interval ``[a, b]``.

    Args:
        f: Scalar integrand.
        a: Lower bound.
        b: Upper bound (``b < a`` flips the sign).
        rel_tol: Acceptance threshold for the local error, relative to the
            global estimate.
        max_levels: Bisection depth cap.
        scale: Magnitude used in place of the internal global estimate; lets
            callers splitting a domain share one tolerance.

    Returns:
        The integral, with Richardson-corrected panel sums.

    Raises:
        QuadratureError: If a panel still fails the tolerance at ``max_levels``.
    """
    if a == b:
        return 0.0
    if b < a:
        return -integrate(f, b, a, rel_tol, max_levels, scale)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integrate needs finite bounds; use integrate_to_infinity")

    glob = abs(scale) if scale is not None else abs(_global_estimate(f, a, b))
    tol = rel_tol * glob
    if tol == 0.0:
        tol = 1e-300

    width = (b - a) / _INITIAL_PANELS
    stack = []
    for i in range(_INITIAL_PANELS):
        lo = a + i * width
        hi = b if i == _INITIAL_PANELS - 1 else a + (i + 1) * width
        flo, fhi, fmid = f(lo), f(hi), f(0.5 * (lo + hi))
        stack.append((lo, hi, flo, fmid, fhi, _simpson(flo, fmid, fhi, hi - lo), 0))

    total = 0.0
    comp = 0.0
    while stack:
        lo, hi, flo, fmid, fhi, whole, level = stack.pop()
        mid = 0.5 * (lo + hi)
        fl = f(0.5 * (lo + mid))
        fr = f(0.5 * (mid + hi))
        left = _simpson(flo, fl, fmid, mid - lo)
        right = _simpson(fmid, fr, fhi, hi - mid)
        delta = left + right - whole
        if abs(delta) <= 15.0 * tol or mid in (lo, hi):
            # Kahan summation keeps many small panels from losing digits
            y = left + right + delta / 15.0 - comp
            t = total + y
            comp = (t - total) - y
            total = t
            continue
        if level + 1 >= max_levels:
            raise QuadratureError(
                f"no convergence on [{lo!r}, {hi!r}] after {max_levels} levels"
            )
        stack.append((lo, mid, flo, fl, fmid, left, level + 1))
        stack.append((mid, hi, fmid, fr, fhi, right, level + 1))
    return total


def integrate_piecewise(
    f: Callable[[float], float],
    points: Iterable[float],
    rel_tol: float = 1e-12,
    max_levels: int = MAX_LEVELS,
    scale: float | None = None,
) -> float:
    """Integrate over consecutive segments of the ascending ``points``.

    Kinks of ``f`` should sit on segment boundaries; Simpson converges slowly
    across them otherwise.
    """
    pts = sorted(set(float(p) for p in points))
    if len(pts) < 2:
        return 0.0
    parts = [_global_estimate(f, lo, hi) for lo, hi in zip(pts, pts[1:])]
    scale = max(sum(abs(p) for p in parts), abs(scale or 0.0))
    return math.fsum(
        integrate(f, lo, hi, rel_tol, max_levels, scale=scale)
        for lo, hi in zip(pts, pts[1:])
    )


def truncation_point(
    f: Callable[[float], float],
    a: float = 0.0,
    start: float = 1.0,
    rel_tol: float = 1e-16,
    max_doublings: int = 128,
    breakpoints: Iterable[float] = (),
) -> tuple[float, float]:
    """Locate a cutoff for the tail of ``f`` on ``[a, inf)``.

    Probes ``start, 2*start, 4*start, ...`` and stops at the first grid point
    ``x`` where ``|f(x)|`` is below ``rel_tol`` times the running integral
    and the last doubling segment added less than 1e-12 of it. An integrand
    that stays identically zero yields ``(x, 0.0)``.

    Returns:
        ``(x, integral over [a, x])``.

    Raises:
        QuadratureError: If the tail never becomes negligible, which is how
            a non-integrable tail shows up at working precision.
    """
    kinks = sorted(float(p) for p in breakpoints if p > a)
    lo = a
    hi = max(start, a + start) if a > 0 else start
    running = 0.0
    for _ in range(max_doublings):
        pts = [lo] + [k for k in kinks if lo < k < hi] + [hi]
        seg = integrate_piecewise(f, pts, scale=running or None)
        running += seg
        ref = abs(running)
        if ref > 0 and abs(f(hi)) <= rel_tol * ref and abs(seg) <= 1e-12 * ref:
            return hi, running
        lo, hi = hi, 2.0 * hi
    if running == 0.0:
        return lo, 0.0
    raise QuadratureError(f"tail not negligible after {max_doublings} doublings")


def integrate_to_infinity(
    f: Callable[[float], float],
    a: float = 0.0,
    breakpoints: Iterable[float] = (),
) -> float:
    """Integrate ``f`` over ``[a, inf)`` by doubling-grid truncation."""
    return truncation_point(f, a, breakpoints=breakpoints)[1]
