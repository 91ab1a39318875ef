import io
import math

import numpy as np
import pytest

from su2meas.coords import radii_array, to_hopf_array
from su2meas.measure import InvariantMeasure
from su2meas.radial import GaussianProfile
from su2meas.sampler import (
    CHUNK_SIZE,
    RandomStream,
    SampleBatch,
    iter_invariant,
    read_csv,
    sample_gaussian_direct,
    sample_invariant,
    write_csv,
)
from su2meas.stats import ks_test, ks_two_sample
from su2meas.su2 import apply_array, haar_sample

N = 100_000


def gaussian_abs_cdf(l):
    return 1.0 - (l * l / 2 + 1.0) * np.exp(-l * l / 2)


def rayleigh_cdf(s):
    return 1.0 - np.exp(-s * s / 2)


@pytest.fixture(scope="module")
def gauss_batch():
    return sample_invariant(InvariantMeasure(GaussianProfile()), N, RandomStream(101))


@pytest.fixture(scope="module")
def direct_batch():
    return sample_gaussian_direct(N, RandomStream(202))


def test_golden_points():
    m = InvariantMeasure(GaussianProfile())
    assert sample_invariant(m, 1, 7).points.tolist() == [
        [-1.5116403199252677, -0.09195125903045248, 0.6209140254588208, 0.16885416910015055]
    ]
    assert sample_gaussian_direct(1, 7).points.tolist() == [
        [0.1489874334251287, -0.6382234586634595, 0.1853210650697172, 0.6267951393434746]
    ]


def test_batch_metadata(gauss_batch):
    assert len(gauss_batch) == N
    assert gauss_batch.seed == 101
    assert gauss_batch.profile_id == "gaussian"
    assert np.all(np.isfinite(gauss_batch.points))


def test_invariant_marginals(gauss_batch):
    l, psi, phi, theta = to_hopf_array(gauss_batch.points)
    assert ks_test(l, gaussian_abs_cdf).passed
    assert ks_test(psi, lambda p: np.sin(p) ** 2).passed
    assert ks_test(phi, lambda x: x / (2 * math.pi)).passed
    assert ks_test(theta, lambda x: x / (2 * math.pi)).passed


def test_psi_law_for_every_profile(any_measure):
    batch = sample_invariant(any_measure, N, RandomStream(303))
    l, psi, _, _ = to_hopf_array(batch.points)
    assert ks_test(psi, lambda p: np.sin(p) ** 2).passed
    assert ks_test(l, any_measure.profile.cdf).passed


def test_direct_marginals(direct_batch):
    r, rho = radii_array(direct_batch.points)
    assert ks_test(r, rayleigh_cdf).passed
    assert ks_test(rho, rayleigh_cdf).passed
    assert ks_test(np.hypot(r, rho), gaussian_abs_cdf).passed
    x, u = direct_batch.points[:, 0], direct_batch.points[:, 2]
    assert -0.01 <= np.corrcoef(x, u)[0, 1] <= 0.01


def test_two_samplers_agree(gauss_batch, direct_batch):
    a = to_hopf_array(gauss_batch.points)
    b = to_hopf_array(direct_batch.points)
    for name, x, y in zip(("l", "psi", "phi", "theta"), a, b):
        assert ks_two_sample(x, y, name).passed, name


def test_su2_invariance_of_batch(gauss_batch):
    U = haar_sample(np.random.default_rng(9))
    moved = apply_array(U, gauss_batch.points)
    l0, psi0, _, _ = to_hopf_array(gauss_batch.points)
    l1, psi1, _, _ = to_hopf_array(moved)
    assert ks_two_sample(psi0, psi1).passed
    assert ks_two_sample(l0, l1).passed
    np.testing.assert_allclose(l0, l1, rtol=1e-12)


def test_determinism_byte_identical():
    m = InvariantMeasure(GaussianProfile())
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        write_csv(sample_invariant(m, 500, 99), buf)
        outs.append(buf.getvalue().encode())
    assert outs[0] == outs[1]
    buf = io.StringIO()
    write_csv(sample_invariant(m, 500, 98), buf)
    assert buf.getvalue().encode() != outs[0]


def test_chunking_and_workers_do_not_change_draws():
    m = InvariantMeasure(GaussianProfile())
    n = 2 * CHUNK_SIZE + 17
    serial = sample_invariant(m, n, 5).points
    parallel = sample_invariant(m, n, 5, workers=3).points
    streamed = np.concatenate(list(iter_invariant(m, n, 5)))
    np.testing.assert_array_equal(serial, parallel)
    np.testing.assert_array_equal(serial, streamed)
    # a longer batch extends a shorter one
    np.testing.assert_array_equal(sample_invariant(m, 100, 5).points, serial[:100])


def test_split_streams_are_distinct():
    root = RandomStream(1)
    kids = root.split(3)
    draws = [k.generator().random(4).tolist() for k in [root, *kids]]
    assert len({tuple(d) for d in draws}) == 4
    assert RandomStream(1).split(3) == kids


def test_seed_range():
    with pytest.raises(ValueError):
        RandomStream(-1)
    with pytest.raises(ValueError):
        RandomStream(2**64)
    RandomStream(2**64 - 1).generator()


def test_csv_roundtrip_exact(tmp_path):
    batch = sample_gaussian_direct(1000, 3)
    path = tmp_path / "batch.csv"
    write_csv(batch, path)
    text = path.read_text().splitlines()
    assert text[0] == "x,y,u,v" and len(text) == 1001
    np.testing.assert_array_equal(read_csv(path), batch.points)


def test_batch_validation():
    with pytest.raises(ValueError):
        SampleBatch(np.zeros((2, 4)), 0, "x")
    with pytest.raises(ValueError):
        SampleBatch(np.full((1, 4), np.nan), 0, "x")
    with pytest.raises(ValueError):
        SampleBatch(np.ones((3, 3)), 0, "x")
    with pytest.raises(ValueError):
        sample_invariant(InvariantMeasure(GaussianProfile()), 0, 1)


def test_batch_iterates_points():
    batch = sample_gaussian_direct(3, 0)
    assert [list(p) for p in batch] == batch.points.tolist()
    assert list(batch.point(1)) == batch.points[1].tolist()
