"""Samplers for SU(2)-invariant probability measures on C^2.

Random streams
--------------
A :class:`RandomStream` is a 64-bit seed plus a spawn key. Draws are made in
fixed chunks of ``CHUNK_SIZE`` points; chunk ``j`` uses its own PCG64
generator seeded by ``SeedSequence(seed, spawn_key=key + (0, j))``. Child
streams from :meth:`RandomStream.split` use ``key + (1, i)``. Because every
chunk owns its generator, output does not depend on how chunks are spread
over workers or whether they are streamed.
"""

from __future__ import annotations

import io
import math
import os
from collections.abc import Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .coords import CartesianPoint, from_hopf_array
from .measure import InvariantMeasure

__all__ = [
    "GENERATOR",
    "CHUNK_SIZE",
    "RandomStream",
    "SampleBatch",
    "iter_invariant",
    "iter_gaussian_direct",
    "sample_invariant",
    "sample_gaussian_direct",
    "write_csv",
    "read_csv",
]

GENERATOR = "pcg64-seedseq-chunked-v1"
CHUNK_SIZE = 1 << 16
_CHUNK_TAG = 0
_SPLIT_TAG = 1
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RandomStream:
    seed: int = 0
    key: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))

    def generator(self) -> np.random.Generator:
        """Sequential generator for scalar draws such as Haar matrices."""
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=self.key)))

    def chunk_generator(self, index: int) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.key + (_CHUNK_TAG, index))
        return np.random.Generator(np.random.PCG64(ss))

    def split(self, count: int) -> list[RandomStream]:
        """Independent child streams for parallel workers."""
        return [RandomStream(self.seed, self.key + (_SPLIT_TAG, i)) for i in range(count)]


def _as_stream(rng: RandomStream | int) -> RandomStream:
    return rng if isinstance(rng, RandomStream) else RandomStream(int(rng))


@dataclass
class SampleBatch:
    """``n`` points of C^2 stored as an ``(n, 4)`` array of ``(x, y, u, v)``."""

    points: np.ndarray
    seed: int
    profile_id: str
    generator: str = field(default=GENERATOR)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 4:
            raise ValueError(f"points must have shape (n, 4), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("batch contains non-finite coordinates")
        if np.any(np.all(pts == 0.0, axis=1)):
            raise ValueError("batch contains the origin")
        self.points = pts

    def __len__(self) -> int:
        return self.points.shape[0]

    def point(self, i: int) -> CartesianPoint:
        return CartesianPoint(*self.points[i])

    def __iter__(self) -> Iterator[CartesianPoint]:
        return (CartesianPoint(*row) for row in self.points)


def _chunk_sizes(n: int) -> list[int]:
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n!r}")
    full, rest = divmod(n, CHUNK_SIZE)
    return [CHUNK_SIZE] * full + ([rest] if rest else [])


def _invariant_chunk(m: InvariantMeasure, stream: RandomStream, index: int, size: int) -> np.ndarray:
    gen = stream.chunk_generator(index)
    u = gen.random((size, 4))
    length = m.profile.quantile(u[:, 0])
    # l = 0 would put the point at the origin; redraw those levels
    zero = length <= 0.0
    while np.any(zero):
        u[zero, 0] = gen.random(int(zero.sum()))
        length[zero] = m.profile.quantile(u[zero, 0])
        zero = length <= 0.0
    psi = np.arcsin(np.sqrt(u[:, 1]))
    return from_hopf_array(length, psi, TWO_PI * u[:, 2], TWO_PI * u[:, 3])


def _gaussian_chunk(stream: RandomStream, index: int, size: int) -> np.ndarray:
    gen = stream.chunk_generator(index)
    pts = gen.standard_normal((size, 4))
    zero = np.all(pts == 0.0, axis=1)
    while np.any(zero):
        pts[zero] = gen.standard_normal((int(zero.sum()), 4))
        zero = np.all(pts == 0.0, axis=1)
    return pts


def _run_chunks(make, n: int, workers: int) -> Iterator[np.ndarray]:
    sizes = _chunk_sizes(n)
    if workers <= 1:
        for j, size in enumerate(sizes):
            yield make(j, size)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map keeps chunk order, so output is independent of worker count
        yield from pool.map(make, range(len(sizes)), sizes)


def iter_invariant(
    m: InvariantMeasure, n: int, rng: RandomStream | int = 0, workers: int = 1
) -> Iterator[np.ndarray]:
    """Yield the points of :func:`sample_invariant` chunk by chunk."""
    stream = _as_stream(rng)
    return _run_chunks(lambda j, size: _invariant_chunk(m, stream, j, size), n, workers)


def iter_gaussian_direct(n: int, rng: RandomStream | int = 0, workers: int = 1) -> Iterator[np.ndarray]:
    stream = _as_stream(rng)
    return _run_chunks(lambda j, size: _gaussian_chunk(stream, j, size), n, workers)


def sample_invariant(
    m: InvariantMeasure, n: int, rng: RandomStream | int = 0, workers: int = 1
) -> SampleBatch:
    """Draw ``n`` i.i.d. points from the invariant measure ``m``.

    Each point is ``from_hopf(l, psi, phi, theta)`` with ``l`` the quantile of
    ``|W|`` at a uniform level, ``psi = arcsin(sqrt(u))`` (CDF ``sin^2``),
    and ``phi``, ``theta`` uniform on ``[0, 2 pi)``.
    """
    stream = _as_stream(rng)
    pts = np.concatenate(list(iter_invariant(m, n, stream, workers)))
    return SampleBatch(pts, stream.seed, m.label())


def sample_gaussian_direct(n: int, rng: RandomStream | int = 0, workers: int = 1) -> SampleBatch:
    """Draw ``n`` points whose four real coordinates are independent N(0, 1)."""
    stream = _as_stream(rng)
    pts = np.concatenate(list(iter_gaussian_direct(n, stream, workers)))
    return SampleBatch(pts, stream.seed, "gaussian-direct")


def write_csv(points, out) -> None:
    """Write ``x,y,u,v`` rows with 17 significant digits.

    ``points`` is a :class:`SampleBatch`, an ``(n, 4)`` array or an iterable
    of such arrays (streamed); ``out`` is a path or a text file object.
    """
    if isinstance(out, (str, os.PathLike)):
        with open(out, "w", newline="") as fh:
            write_csv(points, fh)
        return
    if isinstance(points, SampleBatch):
        chunks = [points.points]
    elif isinstance(points, np.ndarray):
        chunks = [points]
    else:
        chunks = points
    out.write("x,y,u,v\n")
    for chunk in chunks:
        buf = io.StringIO()
        np.savetxt(buf, np.asarray(chunk, dtype=float), fmt="%.17g", delimiter=",")
        out.write(buf.getvalue())


def read_csv(source) -> np.ndarray:
    """Read a batch CSV written by :func:`write_csv` into an ``(n, 4)`` array."""
    data = np.loadtxt(source, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 4:
        raise ValueError(f"expected 4 columns, found {data.shape[1]}")
    return data
