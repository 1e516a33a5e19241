import pytest
from hypothesis import HealthCheck, settings

from drforms.cinfty import working_precision
from drforms.suites import RunContext

settings.register_profile(
    "drforms",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("drforms")

CONFIGS = [(2, 2), (3, 2), (2, 3)]
PRECISION = 80
T_TRUNC = 16

_contexts = {}


def context(q, r, point="canonical"):
    key = (q, r, point)
    if key not in _contexts:
        _contexts[key] = RunContext(q, r, N=T_TRUNC, P=PRECISION, point=point)
    return _contexts[key]


@pytest.fixture
def precision():
    with working_precision(PRECISION):
        yield PRECISION


@pytest.fixture(params=CONFIGS, ids=lambda c: f"q{c[0]}r{c[1]}")
def ctx(request, precision):
    return context(*request.param)


@pytest.fixture(params=CONFIGS, ids=lambda c: f"q{c[0]}r{c[1]}")
def perturbed_ctx(request, precision):
    return context(*request.param, point="perturbed")
