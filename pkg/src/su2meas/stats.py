"""Monte Carlo estimators and goodness-of-fit checks.

Every check returns a :class:`TestReport`. KS reports pass when the
statistic is at most the asymptotic 1% critical value; estimator reports
pass when the estimate lies within a 4-sigma binomial band of the target.
"""

from __future__ import annotations

import json
import math
from collections.abc import Callable, Iterable
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import chi2

from .coords import radii_array, to_hopf_array
from .errors import BothZero
from .measure import (
    AngleSet,
    InvariantMeasure,
    born_probability,
    chain_probability,
    cone_measure,
)
from .sampler import SampleBatch
from .su2 import SU2Matrix, apply_array, haar_sample

__all__ = [
    "KS_COEFFICIENT",
    "TestReport",
    "estimate_chain",
    "estimate_born",
    "estimator_report",
    "ks_statistic",
    "ks_test",
    "ks_two_sample",
    "invariance_test",
    "independence_test",
    "dumps",
    "write_reports",
]

# asymptotic one-sample KS critical value at alpha = 0.01
KS_COEFFICIENT = 1.63
SIGMA_BAND = 4.0


@dataclass(frozen=True)
class TestReport:
    name: str
    n: int
    statistic: float
    threshold: float
    estimate: float | None = None
    target: float | None = None

    __test__ = False  # keep pytest from collecting this class

    @property
    def passed(self) -> bool:
        return bool(self.statistic <= self.threshold)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = self.passed
        return d

    def to_json(self) -> str:
        return dumps(self.to_dict())


def _fmt(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def dumps(obj) -> str:
    """JSON encoding with floats written to 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def write_reports(reports: Iterable[TestReport], out) -> None:
    """One JSON object per line."""
    for report in reports:
        out.write(report.to_json() + "\n")


def _points(batch) -> np.ndarray:
    pts = batch.points if isinstance(batch, SampleBatch) else np.asarray(batch, dtype=float)
    if pts.shape[0] == 0:
        raise ValueError("empty batch")
    return pts


def estimate_chain(batch: SampleBatch, t: float) -> float:
    """Fraction of points with ``|beta| <= t |alpha|``."""
    if not t >= 0.0:
        raise ValueError(f"t must be nonnegative, got {t!r}")
    r, rho = radii_array(_points(batch))
    return float(np.count_nonzero(rho <= t * r)) / r.size


def estimate_born(batch: SampleBatch, a_mag: float, b_mag: float) -> float:
    """Fraction of points with ``a |alpha| >= b |beta|``.

    For ``b > 0`` this is ``estimate_chain(batch, a / b)``, evaluated with
    that exact predicate.
    """
    if not (a_mag >= 0.0 and b_mag >= 0.0):
        raise ValueError("amplitude magnitudes must be nonnegative")
    if a_mag == 0.0 and b_mag == 0.0:
        raise BothZero("a and b are both zero")
    if b_mag == 0.0:
        _points(batch)
        return 1.0
    return estimate_chain(batch, a_mag / b_mag)


def estimator_report(name: str, estimate: float, target: float, n: int) -> TestReport:
    """Compare a Bernoulli frequency with its target at 4 sigma."""
    band = SIGMA_BAND * math.sqrt(target * (1.0 - target) / n)
    return TestReport(name, n, abs(estimate - target), band, estimate, target)


def ks_statistic(samples, cdf: Callable) -> float:
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_test(samples, cdf: Callable, name: str = "ks") -> TestReport:
    """One-sample Kolmogorov-Smirnov test at alpha = 0.01."""
    n = np.size(samples)
    if n < 10:
        raise ValueError("ks_test needs at least 10 samples")
    return TestReport(name, n, ks_statistic(samples, cdf), KS_COEFFICIENT / math.sqrt(n))


def ks_two_sample_statistic(a, b) -> float:
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    grid = np.concatenate((a, b))
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_two_sample(a, b, name: str = "ks2") -> TestReport:
    """Two-sample KS test with the asymptotic 1% critical value."""
    n, m = np.size(a), np.size(b)
    threshold = KS_COEFFICIENT * math.sqrt((n + m) / (n * m))
    return TestReport(name, min(n, m), ks_two_sample_statistic(a, b), threshold)


def invariance_test(batch: SampleBatch, u: SU2Matrix, name: str = "invariance") -> TestReport:
    """Two-sample KS of the ``psi`` and ``l`` marginals of ``w`` against ``U w``.

    The report carries the larger of the two statistics.
    """
    pts = _points(batch)
    n = pts.shape[0]
    if n < 1000:
        raise ValueError("invariance_test needs at least 1000 points")
    l0, psi0, _, _ = to_hopf_array(pts)
    l1, psi1, _, _ = to_hopf_array(apply_array(u, pts))
    stat = max(ks_two_sample_statistic(psi0, psi1), ks_two_sample_statistic(l0, l1))
    return TestReport(name, n, stat, KS_COEFFICIENT * math.sqrt(2.0 / n))


def independence_test(
    a_samples, b_samples, edges_a, edges_b, alpha: float = 0.01, name: str = "independence"
) -> TestReport:
    """Chi-square test of independence on a contingency table.

    ``edges_*`` are interior bin edges; ``k`` edges make ``k + 1`` bins.
    """
    a = np.asarray(a_samples, dtype=float)
    b = np.asarray(b_samples, dtype=float)
    ia = np.searchsorted(np.asarray(edges_a, dtype=float), a, side="right")
    ib = np.searchsorted(np.asarray(edges_b, dtype=float), b, side="right")
    ka, kb = len(edges_a) + 1, len(edges_b) + 1
    observed = np.zeros((ka, kb))
    np.add.at(observed, (ia, ib), 1.0)
    n = a.size
    expected = np.outer(observed.sum(axis=1), observed.sum(axis=0)) / n
    if np.any(expected == 0.0):
        raise ValueError("an empty row or column makes the table degenerate")
    stat = float(np.sum((observed - expected) ** 2 / expected))
    dof = (ka - 1) * (kb - 1)
    return TestReport(name, n, stat, float(chi2.ppf(1.0 - alpha, dof)))


# -- full verification suite ------------------------------------------------


def _rayleigh_cdf(s):
    return -np.expm1(-0.5 * np.square(s))


def _gaussian_abs_cdf(l):  # noqa: E741
    x = 0.5 * np.square(l)
    return 1.0 - (x + 1.0) * np.exp(-x)


def _sin2_cdf(psi):
    return np.sin(psi) ** 2


def run_suite(m: InvariantMeasure, n: int = 100_000, seed: int = 0) -> list[TestReport]:
    """Run the verification checks for one profile.

    Covers cone closed forms, normalization, chain and Born estimates,
    |W| and psi laws, the Rayleigh marginals of the direct Gaussian sampler,
    SU(2) invariance and the coordinate geometry. Estimator and KS checks use
    ``n`` points; the suite is deterministic given ``seed``.
    """
    from . import coords, quadrature, radial, su2
    from .sampler import RandomStream, sample_gaussian_direct, sample_invariant

    reports: list[TestReport] = []
    root = RandomStream(seed)
    s_inv, s_direct, s_haar, s_geom = root.split(4)
    label = m.label()

    # cone closed forms against quadrature of sin(2 psi)
    reports.append(TestReport("cone_full", 1, abs(cone_measure(m, AngleSet.full()) - 1.0), 0.0, cone_measure(m, AngleSet.full()), 1.0))
    half = cone_measure(m, AngleSet.interval(0.0, math.pi / 4))
    reports.append(TestReport("cone_quarter", 1, abs(half - 0.5), 1e-15, half, 0.5))
    gen = s_geom.generator()
    worst = 0.0
    for _ in range(50):
        lo, hi = np.sort(gen.uniform(0.0, math.pi / 2, 2))
        numeric = quadrature.integrate(lambda p: math.sin(2.0 * p), lo, hi) if hi > lo else 0.0
        worst = max(worst, abs(cone_measure(m, AngleSet.interval(lo, hi)) - numeric))
    reports.append(TestReport("cone_vs_quadrature", 50, worst, 1e-10))

    # normalization by closed form and by quadrature
    nf = m.profile
    for method in ("auto", "quadrature"):
        total = radial.TWO_PI_SQ * nf.scale * radial.third_moment(nf.profile, method=method)
        reports.append(TestReport(f"normalization_{method}", 1, abs(total - 1.0), 1e-10, total, 1.0))

    batch = sample_invariant(m, n, s_inv)
    for t in (0.5, 1.0, 2.0):
        reports.append(estimator_report(f"chain_t={t:g}[{label}]", estimate_chain(batch, t), chain_probability(t), n))
    reports.append(estimator_report(f"born_2_1[{label}]", estimate_born(batch, 2.0, 1.0), born_probability(2.0, 1.0), n))

    length, psi, phi, theta = to_hopf_array(batch.points)
    reports.append(ks_test(length, nf.cdf, f"abs_w_ks[{label}]"))
    reports.append(ks_test(psi, _sin2_cdf, f"psi_ks[{label}]"))
    reports.append(ks_test(phi, lambda x: x / (2 * math.pi), f"phi_ks[{label}]"))
    reports.append(ks_test(theta, lambda x: x / (2 * math.pi), f"theta_ks[{label}]"))

    direct = sample_gaussian_direct(n, s_direct)
    reports.append(estimator_report("born_2_1[direct]", estimate_born(direct, 2.0, 1.0), born_probability(2.0, 1.0), n))
    reports.append(ks_test(to_hopf_array(direct.points)[0], _gaussian_abs_cdf, "abs_w_ks[direct]"))
    r, rho = radii_array(direct.points)
    reports.append(ks_test(r, _rayleigh_cdf, "rayleigh_abs_a[direct]"))
    reports.append(ks_test(rho, _rayleigh_cdf, "rayleigh_abs_b[direct]"))
    quartiles = np.sqrt(-2.0 * np.log1p(-np.array([0.25, 0.5, 0.75])))
    reports.append(independence_test(r, rho, quartiles, quartiles, name="rayleigh_independence[direct]"))

    haar_gen = s_haar.generator()
    for k in range(10):
        reports.append(invariance_test(batch, su2.haar_sample(haar_gen), f"invariance_{k}[{label}]"))

    # geometry: round trips and the aligning matrix
    pts = gen.uniform(-10.0, 10.0, (1000, 4))
    pts = pts[np.linalg.norm(pts, axis=1) > 1e-9]
    worst_hopf = worst_dp = worst_align = 0.0
    for row in pts:
        w = coords.CartesianPoint(*row)
        scale = w.norm()
        back = coords.from_hopf(coords.to_hopf(w)).as_array()
        worst_hopf = max(worst_hopf, float(np.max(np.abs(back - row))) / scale)
        back = coords.from_double_polar(coords.to_double_polar(w)).as_array()
        worst_dp = max(worst_dp, float(np.max(np.abs(back - row))) / scale)
        aligned = su2.apply(su2.aligning_matrix(w), w).as_array()
        aligned[0] -= scale
        worst_align = max(worst_align, float(np.max(np.abs(aligned))) / scale)
    reports.append(TestReport("roundtrip_hopf", len(pts), worst_hopf, 1e-12))
    reports.append(TestReport("roundtrip_double_polar", len(pts), worst_dp, 1e-12))
    reports.append(TestReport("aligning_matrix", len(pts), worst_align, 1e-12))
    return reports
