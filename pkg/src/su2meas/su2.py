"""The group SU(2) acting on C^2.

A matrix is stored through its first column ``(alpha, beta)``; the full
form is ``[[alpha, -conj(beta)], [beta, conj(alpha)]]``. The identification
``U -> (alpha, beta)`` maps SU(2) onto the unit sphere of C^2, and the
uniform law on that sphere is the Haar probability of the group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coords import CartesianPoint
from .errors import ZeroVector

__all__ = [
    "SU2Matrix",
    "identity",
    "apply",
    "apply_array",
    "compose",
    "inverse",
    "aligning_matrix",
    "haar_sample",
]

UNIT_TOL = 1e-12
_HAAR_MIN_NORM = 1e-6


@dataclass(frozen=True)
class SU2Matrix:
    a_re: float
    a_im: float
    b_re: float
    b_im: float

    def __post_init__(self):
        norm2 = self.a_re**2 + self.a_im**2 + self.b_re**2 + self.b_im**2
        if not abs(norm2 - 1.0) <= UNIT_TOL:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {norm2!r}, expected 1")

    @classmethod
    def from_complex(cls, alpha: complex, beta: complex) -> SU2Matrix:
        return cls(alpha.real, alpha.imag, beta.real, beta.imag)

    @classmethod
    def normalized(cls, alpha: complex, beta: complex) -> SU2Matrix:
        """Build from a column that is only approximately unit length."""
        n = math.hypot(alpha.real, alpha.imag, beta.real, beta.imag)
        if n == 0.0:
            raise ZeroVector("cannot normalize a zero column")
        return cls(alpha.real / n, alpha.imag / n, beta.real / n, beta.imag / n)

    @property
    def alpha(self) -> complex:
        return complex(self.a_re, self.a_im)

    @property
    def beta(self) -> complex:
        return complex(self.b_re, self.b_im)

    def matrix(self) -> np.ndarray:
        a, b = self.alpha, self.beta
        return np.array([[a, -b.conjugate()], [b, a.conjugate()]])

    def first_column(self) -> CartesianPoint:
        return CartesianPoint(self.a_re, self.a_im, self.b_re, self.b_im)


def identity() -> SU2Matrix:
    return SU2Matrix(1.0, 0.0, 0.0, 0.0)


def apply(U: SU2Matrix, w: CartesianPoint) -> CartesianPoint:
    a, b = U.alpha, U.beta
    wa, wb = w.alpha, w.beta
    return CartesianPoint.from_complex(
        a * wa - b.conjugate() * wb,
        b * wa + a.conjugate() * wb,
    )


def apply_array(U: SU2Matrix, points: np.ndarray) -> np.ndarray:
    """Apply ``U`` to every row of an ``(n, 4)`` point array."""
    pts = np.asarray(points, dtype=float)
    wa = pts[:, 0] + 1j * pts[:, 1]
    wb = pts[:, 2] + 1j * pts[:, 3]
    a, b = U.alpha, U.beta
    na = a * wa - b.conjugate() * wb
    nb = b * wa + a.conjugate() * wb
    return np.column_stack((na.real, na.imag, nb.real, nb.imag))


def compose(U: SU2Matrix, V: SU2Matrix) -> SU2Matrix:
    """Matrix product ``U V``, renormalized to stop drift over long chains."""
    # first column of UV is U applied to the first column of V
    col = apply(U, V.first_column())
    return SU2Matrix.normalized(col.alpha, col.beta)


def inverse(U: SU2Matrix) -> SU2Matrix:
    # U^dagger has first column (conj(alpha), -beta)
    return SU2Matrix(U.a_re, -U.a_im, -U.b_re, -U.b_im)


def aligning_matrix(w: CartesianPoint) -> SU2Matrix:
    """The matrix ``U_w`` with ``U_w w = (|w|, 0)``.

    Its rows are ``(conj(alpha), conj(beta)) / l`` and ``(-beta, alpha) / l``.
    """
    if w.is_origin():
        raise ZeroVector("no aligning matrix for the origin")
    length = w.norm()
    return SU2Matrix.normalized(w.alpha.conjugate() / length, -w.beta / length)


def haar_sample(rng: np.random.Generator) -> SU2Matrix:
    """Draw a Haar-distributed element of SU(2).

    Four independent standard normals are normalized to a point of the unit
    sphere in C^2; draws with norm below 1e-6 are rejected.
    """
    while True:
        g = rng.standard_normal(4)
        n = math.hypot(*g)
        if n >= _HAAR_MIN_NORM:
            return SU2Matrix(*(float(c) / n for c in g))
