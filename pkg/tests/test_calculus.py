import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import tube_points
from tubebergman import ball as B
from tubebergman.calculus import (MultiIndex, ball_gradient_at_origin, bergman_matrix, contour_radii,
                                  gradient_norm_from_matrix, holo_derivative,
                                  invariant_gradient_norm, invariant_laplacian,
                                  invariant_laplacian_from_matrix, lop, lop_expansion)
from tubebergman.domain import DomainConfig, base_point, random_points, rho, rho_self
from tubebergman.errors import ContourEscapesDomain, NonFinite, StepTooSmall
from tubebergman.functions import (FunctionHandle, abs_power, compose, make_constant, make_coordinate,
                                   make_rho_power)
from tubebergman.quadrature import QuadratureSpec, integrate_ball


def numeric(f):
    return FunctionHandle(evaluate=f.evaluate, name=f.name, holomorphic=f.holomorphic)


@given(st.lists(st.integers(0, 3), min_size=1, max_size=4))
def test_multi_index_weight_identity(g):
    m = MultiIndex(tuple(g))
    assert m.order == m.angle + sum(m.prime) / 2


def test_multi_index_validation():
    assert MultiIndex.unit(1, 3, 2).gamma == (0, 2, 0)
    with pytest.raises(ValueError):
        MultiIndex((1, -1))


@given(tube_points())
def test_contour_stays_in_tube(z):
    n = z.size
    axes = list(range(n))
    r = contour_radii(z, axes)
    theta = np.linspace(0, 2 * np.pi, 17)
    for t in theta:
        p = z.copy()
        for k, a in enumerate(axes):
            p[a] += r[k] * np.exp(1j * (t + k))
        assert rho_self(p) > 0


def test_contour_rejects_exterior():
    with pytest.raises(ContourEscapesDomain):
        contour_radii(np.array([0, -1j]), [1])


def test_holo_derivative_examples(rng):
    z = random_points(rng, 2, (), rho_range=(0.5, 2))
    assert holo_derivative(make_coordinate(1, 2), z, (0, 1)) == pytest.approx(1.0, abs=1e-12)
    assert holo_derivative(make_constant(3.0), z, (1, 1)) == pytest.approx(0.0, abs=1e-10)
    f = make_rho_power(base_point(2), 3)
    assert holo_derivative(f, z, MultiIndex((0, 1))) == pytest.approx(
        1.5j * rho(z, base_point(2)) ** -4, rel=1e-9)
    with pytest.raises(ValueError):
        holo_derivative(f, z, (3, 2))


def test_holo_derivative_nonfinite():
    bad = FunctionHandle(evaluate=lambda w: np.full(w.shape[:-1], np.nan + 0j))
    with pytest.raises(NonFinite):
        holo_derivative(bad, base_point(1), (1,))


def test_second_derivative_against_exact(rng):
    u0 = random_points(rng, 2, (), rho_range=(0.5, 2))
    f = make_rho_power(u0, 2.0)
    z = random_points(rng, 2, (), rho_range=(0.5, 2))
    # d^2/dz_n^2 rho(z,u0)^-2 = 6 (i/2)^2 rho^-4
    assert holo_derivative(f, z, (0, 2)) == pytest.approx(6 * (0.5j) ** 2 * rho(z, u0) ** -4, rel=1e-8)


def test_lop_examples(rng):
    for z in random_points(rng, 3, 5):
        assert lop(make_coordinate(2, 3), z, (0, 0, 1)) == pytest.approx(1.0, abs=1e-10)
        for j in range(2):
            e = tuple(int(k == j) for k in range(3))
            assert lop(make_coordinate(j, 3), z, e) == pytest.approx(1.0, abs=1e-10)
            assert lop(make_coordinate(2, 3), z, e) == pytest.approx(2 * z[j].imag, abs=1e-10)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_iterated_ln_of_rho_power(N, rng):
    u0 = random_points(rng, 2, (), rho_range=(0.5, 2))
    m = 2.5
    f = make_rho_power(u0, m)
    for z in random_points(rng, 2, 4, rho_range=(0.3, 3)):
        exact = math.gamma(m + N) / math.gamma(m) * (0.5j) ** N * rho(z, u0) ** (-m - N)
        assert f.lop(z, (0, N)) == pytest.approx(exact, rel=1e-12)
        assert lop(numeric(f), z, (0, N)) == pytest.approx(exact, rel=1e-7)


def test_lop_order_matters():
    # L_1 L_2 and L_2 L_1 differ by the derivative of the coefficient 2 y_1
    expr = lop_expansion((1, 1))
    assert expr and all(isinstance(k, tuple) for k in expr)
    f = make_rho_power(np.array([0.2 + 0.1j, 0.3 + 2j]), 2.0)
    z = np.array([0.4 + 0.5j, -0.1 + 1.5j])
    mixed = lop(numeric(f), z, (1, 1))
    assert mixed == pytest.approx(f.lop(z, (1, 1)), rel=1e-7)


def test_invariant_gradient_examples(rng):
    z = random_points(rng, 1, 20)
    g = invariant_gradient_norm(make_coordinate(0, 1), z)
    assert np.allclose(g, 2 * math.sqrt(2) * rho_self(z), rtol=1e-9)
    assert invariant_gradient_norm(make_coordinate(0, 1), base_point(1)[None, :])[0] == pytest.approx(
        2 * math.sqrt(2))
    assert np.allclose(invariant_gradient_norm(make_constant(2.0), z), 0, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_ball_side_gradient(n, rng):
    u0 = random_points(rng, n, (), rho_range=(0.5, 2), x_scale=0.5, y_scale=0.3)
    f = make_rho_power(u0, 3.0)
    tube = invariant_gradient_norm(numeric(f), base_point(n)[None, :])[0]
    assert tube == pytest.approx(math.sqrt(2) * ball_gradient_at_origin(f, n), rel=1e-6)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_gradient_invariance(n, rng):
    f = make_rho_power(random_points(rng, n, (), rho_range=(0.5, 2), x_scale=0.5), 2.0)
    for z, v in zip(random_points(rng, n, 5, rho_range=(0.3, 3)), random_points(rng, n, 5)):
        ft = compose(f, lambda u: B.tau(v, u))
        a = invariant_gradient_norm(ft, z[None, :])[0]
        b = invariant_gradient_norm(f, B.tau(v, z)[None, :], exact=True)[0]
        assert a == pytest.approx(b, rel=1e-6)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bergman_matrix(n, rng):
    for z in random_points(rng, n, 10):
        bm = bergman_matrix(z)
        assert np.allclose(bm.forward @ bm.inverse, np.eye(n), atol=1e-10)
        assert bm.det * (2 * rho_self(z)) ** (n + 1) == pytest.approx(1.0, rel=1e-10)
        assert np.allclose(bm.forward, bm.forward.conj().T)
        assert np.all(np.linalg.eigvalsh(bm.forward) > 0)


def test_bergman_inverse_at_base_point():
    assert np.allclose(bergman_matrix(base_point(2)).inverse, [[2, 0], [0, 4]])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_gradient_from_matrix(n, rng):
    f = make_rho_power(base_point(n), 3.0)
    for z in random_points(rng, n, 10):
        a = gradient_norm_from_matrix(f, z, exact=True)
        b = invariant_gradient_norm(f, z[None, :], exact=True)[0]
        assert a == pytest.approx(b, rel=1e-8)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_laplacian_properties(n, rng):
    f = make_rho_power(random_points(rng, n, (), rho_range=(0.5, 2), x_scale=0.5), 3.0)
    g = abs_power(f, 2)
    for z, v in zip(random_points(rng, n, 5, rho_range=(0.3, 3), x_scale=0.5),
                    random_points(rng, n, 5, rho_range=(0.3, 3), x_scale=0.5)):
        lap = invariant_laplacian(g, z)
        assert isinstance(lap, float)
        grad = invariant_gradient_norm(f, z[None, :], exact=True)[0]
        assert lap == pytest.approx(2 * grad**2, rel=1e-4)
        assert lap == pytest.approx(invariant_laplacian_from_matrix(g, z), rel=1e-6)
        assert abs(invariant_laplacian(f, z)) < 1e-6
        gt = compose(g, lambda u: B.tau(v, u), holomorphic_map=False)
        assert invariant_laplacian(gt, z) == pytest.approx(invariant_laplacian(g, B.tau(v, z)), rel=1e-4)


def test_laplacian_step_guard():
    g = abs_power(make_rho_power(base_point(1), 1.0), 2)
    with pytest.raises(StepTooSmall):
        invariant_laplacian(g, np.array([1e-5j]))


def test_gradient_bound_by_ball_averages(rng):
    # |grad~ f(z)|^p <= C |D(z,r)|^-1 int_D |f|^p dV: the empirical C is finite and stable
    cfg = DomainConfig(1, 0.0)
    ratios = {}
    for samples in (2000, 8000):
        spec = QuadratureSpec(samples=samples, seed=5)
        vals = []
        local = np.random.default_rng(9)
        for _ in range(100):
            u0 = random_points(local, 1, (), rho_range=(0.2, 5), x_scale=2)
            f = make_rho_power(u0, local.uniform(0.5, 3.0))
            z = random_points(local, 1, (), rho_range=(1e-2, 1e2), x_scale=3)
            grad = invariant_gradient_norm(f, z[None, :], exact=True)[0]
            avg = integrate_ball(abs_power(f, 2), z, 1.0, cfg, spec).value.real
            vol = integrate_ball(lambda w: np.ones(w.shape[:-1]), z, 1.0, cfg, spec).value.real
            vals.append(grad**2 / (avg / vol))
        ratios[samples] = max(vals)
    assert all(np.isfinite(v) for v in ratios.values())
    assert ratios[8000] == pytest.approx(ratios[2000], rel=0.25)
