import numpy as np
import pytest

from su2meas import (
    BallUniformProfile,
    ExponentialProfile,
    GaussianProfile,
    InvariantMeasure,
    TabulatedProfile,
)


def random_tabulated(seed: int = 11, size: int = 15, end: float = 4.0) -> TabulatedProfile:
    rng = np.random.default_rng(seed)
    return TabulatedProfile(np.linspace(0.0, end, size), rng.random(size))


def builtin_profiles():
    return {
        "gaussian": GaussianProfile(),
        "exponential": ExponentialProfile(1.0),
        "ball": BallUniformProfile(1.0),
        "tabulated": random_tabulated(),
    }


@pytest.fixture
def gaussian_measure():
    return InvariantMeasure(GaussianProfile())


@pytest.fixture(params=sorted(builtin_profiles()))
def any_measure(request):
    return InvariantMeasure(builtin_profiles()[request.param])
