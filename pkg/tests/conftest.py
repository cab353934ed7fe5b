import numpy as np
import pytest

from ksblowup.constants import GnConstants, assemble_bound_constants
from ksblowup.exponents import DomainSpec, ModelParams, exponents_for


@pytest.fixture
def worked_params():
    return ModelParams(3, 1.0, 2.0, 1.0, 1.0, DomainSpec.ball_with_measure(1.0, 3))


@pytest.fixture
def worked_cfg(worked_params):
    return exponents_for(worked_params, 4.0, 4.0)


@pytest.fixture
def worked_bc(worked_params, worked_cfg):
    return assemble_bound_constants(worked_cfg, worked_params, GnConstants(1.0, 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
