"""SU(2)-invariant absolutely continuous probability measures on C^2."""

from .coords import (
    CartesianPoint,
    DoublePolarPoint,
    HopfPoint,
    eta,
    from_double_polar,
    from_hopf,
    jacobian_double_polar,
    jacobian_hopf,
    to_double_polar,
    to_hopf,
)
from .errors import BothZero, DivergentMoment, ProfileFormatError, ZeroMass, ZeroVector
from .measure import (
    AngleSet,
    InvariantMeasure,
    RadiusSet,
    ball_measure,
    born_probability,
    chain_probability,
    cone_measure,
    product_measure,
    shell_measure,
)
from .radial import (
    BallUniformProfile,
    CallableProfile,
    ExponentialProfile,
    GaussianProfile,
    NormalizedProfile,
    TabulatedProfile,
    abs_cdf,
    abs_density,
    abs_quantile,
    load_tabulated,
    normalize,
    third_moment,
)
from .sampler import RandomStream, SampleBatch, sample_gaussian_direct, sample_invariant
from .stats import TestReport, estimate_born, estimate_chain, invariance_test, ks_test
from .su2 import SU2Matrix, aligning_matrix, apply, compose, haar_sample, identity, inverse

__version__ = "0.1.0"
