import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from tubebergman.domain import base_point

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
log_defect = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


@st.composite
def tube_points(draw, n=None, dims=(1, 2, 3)):
    """Interior points with defect 10^[-3, 3] and moderate real parts."""
    n = draw(st.sampled_from(dims)) if n is None else n
    x = np.array([draw(finite) for _ in range(n)])
    yp = np.array([draw(st.floats(-2, 2)) for _ in range(n - 1)])
    d = 10.0 ** draw(log_defect)
    y = np.concatenate([yp, [d + yp @ yp]])
    return x + 1j * y


@st.composite
def tube_pairs(draw, dims=(1, 2, 3)):
    n = draw(st.sampled_from(dims))
    return draw(tube_points(n=n)), draw(tube_points(n=n))


@st.composite
def ball_points(draw, n=None, dims=(1, 2, 3), max_radius=0.95):
    n = draw(st.sampled_from(dims)) if n is None else n
    v = np.array([complex(draw(finite), draw(finite)) for _ in range(n)])
    norm = np.linalg.norm(v)
    if norm == 0:
        return np.zeros(n, dtype=complex)
    return v / norm * draw(st.floats(0, max_radius))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=[1, 2, 3])
def n(request):
    return request.param


@pytest.fixture
def i_point(n):
    return base_point(n)
