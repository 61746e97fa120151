import math

import numpy as np
import pytest
from hypothesis import given

from conftest import ball_points, tube_pairs, tube_points
from tubebergman import ball as B
from tubebergman.calculus import numerical_complex_jacobian, numerical_real_jacobian
from tubebergman.domain import base_point, random_points, rho, rho_self
from tubebergman.errors import DomainError, PoleError


def test_cayley_origin_and_back(n):
    i = base_point(n)
    assert np.allclose(B.cayley(np.zeros(n)), i)
    assert np.allclose(B.cayley_inv(i), 0)


@pytest.mark.parametrize("t", [-0.9, -0.3, 0.0, 0.5, 0.99])
def test_cayley_real_axis_n1(t):
    assert B.cayley(np.array([t]))[0] == pytest.approx(1j * (1 - t) / (1 + t))


@given(tube_points())
def test_round_trip_tube(z):
    assert np.allclose(B.cayley(B.cayley_inv(z)), z, rtol=0, atol=1e-10 * max(1, np.abs(z).max()))


@given(ball_points())
def test_round_trip_ball(xi):
    assert np.allclose(B.cayley_inv(B.cayley(xi)), xi, atol=1e-10)
    assert rho_self(B.cayley(xi)) > 0


@given(tube_points())
def test_inverse_lands_in_ball(z):
    assert np.sum(np.abs(B.cayley_inv(z)) ** 2) < 1


@given(tube_pairs())
def test_pairing_identity(pair):
    z, w = pair
    i = base_point(z.size)
    lhs = 1 - B.inner(B.cayley_inv(z), B.cayley_inv(w))
    rhs = rho(z, w) / (rho(z, i) * rho(i, w))
    assert abs(lhs - rhs) <= 1e-10


@given(tube_points())
def test_defect_identities(z):
    i = base_point(z.size)
    xi = B.cayley_inv(z)
    assert abs(1 - np.sum(np.abs(xi) ** 2) - rho_self(z) / abs(rho(z, i)) ** 2) <= 1e-10
    assert abs(1 + xi[-1] - 1 / rho(z, i)) <= 1e-10


@given(ball_points(), ball_points())
def test_rho_of_images_with_conjugate(xi, eta):
    n = min(xi.size, eta.size)
    xi, eta = xi[:n], eta[:n]
    lhs = rho(B.cayley(xi), B.cayley(eta))
    rhs = (1 - B.inner(xi, eta)) / ((1 + xi[-1]) * np.conj(1 + eta[-1]))
    assert abs(lhs - rhs) <= 1e-10 * max(1, abs(rhs))


def test_rho_of_images_without_conjugate_fails():
    xi, eta = np.array([0.3j]), np.array([-0.2 + 0.4j])
    printed = (1 - B.inner(xi, eta)) / ((1 + xi[-1]) * (1 + eta[-1]))
    assert abs(rho(B.cayley(xi), B.cayley(eta)) - printed) > 0.1


def test_jacobian_values(n):
    assert B.cayley_jacobian("forward", np.zeros(n)) == pytest.approx(2.0 ** (n + 1))
    assert B.cayley_jacobian("inverse", base_point(n)) == pytest.approx(2.0 ** -(n + 1))
    assert B.printed_inverse_jacobian(base_point(n)) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        B.cayley_jacobian("sideways", np.zeros(n))


def test_inverse_jacobian_printed_value_at_n1():
    assert B.cayley_jacobian("inverse", base_point(1)) == pytest.approx(0.25)


@given(ball_points())
def test_jacobian_chain_rule(xi):
    prod = B.cayley_jacobian("forward", xi) * B.cayley_jacobian("inverse", B.cayley(xi))
    assert prod == pytest.approx(1.0, rel=1e-8)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_jacobians_against_finite_differences(n, rng):
    xi = np.array([0.2 + 0.1j, -0.3j, 0.25][:n])
    num = numerical_real_jacobian(B.cayley, xi, 1e-3 * abs(1 + xi[-1]))
    assert num == pytest.approx(B.cayley_jacobian("forward", xi), rel=1e-6)
    z = random_points(rng, n, (), rho_range=(0.5, 2))
    num = numerical_real_jacobian(B.cayley_inv, z, 1e-3 * min(rho_self(z), 1))
    assert num == pytest.approx(B.cayley_jacobian("inverse", z), rel=1e-6)


def test_pole_guards():
    with pytest.raises(PoleError):
        B.cayley(np.array([-1.0 + 0j]))
    with pytest.raises(PoleError):
        B.cayley_jacobian("forward", np.array([0, -1.0 + 0j]))
    with pytest.raises(DomainError):
        B.BallPoint([0.8, 0.8])


def test_automorphism_basics(rng):
    w = np.array([0.3 - 0.2j, 0.1j])
    assert np.allclose(B.ball_automorphism(np.zeros(2), w), -w)
    a = np.array([0.5j, -0.4])
    assert np.allclose(B.ball_automorphism(a, np.zeros(2)), a)
    assert np.allclose(B.ball_automorphism(a, a), 0, atol=1e-14)


@given(ball_points(n=2, max_radius=0.9), ball_points(n=2, max_radius=0.9))
def test_automorphism_is_involution(a, w):
    assert np.allclose(B.ball_automorphism(a, B.ball_automorphism(a, w)), w, atol=1e-10)
    assert np.sum(np.abs(B.ball_automorphism(a, w)) ** 2) < 1


@given(tube_points())
def test_tau_and_sigma_centre(z):
    i = base_point(z.size)
    assert np.allclose(B.tau(z, z), i, atol=1e-10 * max(1, abs(z[-1])))
    assert np.allclose(B.sigma(z, z), i, atol=1e-10)
    assert np.allclose(B.h_map(z, z), rho_self(z) * i, atol=1e-10 * max(1, abs(z).max()))


@given(tube_pairs())
def test_h_map_preserves_rho(pair):
    z, u = pair
    v = z + 0.3j * base_point(z.size)
    assert abs(rho(B.h_map(z, u), B.h_map(z, v)) - rho(u, v)) <= 1e-9 * max(1, abs(rho(u, v)))


def test_tau_at_base_point(rng):
    u = random_points(rng, 2, 20)
    assert np.allclose(B.tau(base_point(2), u), B.cayley(-B.cayley_inv(u)))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sigma_complex_jacobian(n, rng):
    for z in random_points(rng, n, 10):
        num = numerical_complex_jacobian(lambda u: B.sigma(z, u), z, 1e-3)
        assert abs(num / rho_self(z) ** (-(n + 1) / 2) - 1) < 1e-6


@pytest.mark.parametrize("y", [2.0, 5.0, 10.0])
def test_beta_closed_form_n1(y):
    assert B.beta(np.array([1j]), np.array([1j * y])) == pytest.approx(0.5 * math.log(y), abs=1e-8)


@given(tube_pairs())
def test_beta_metric_properties(pair):
    z, w = pair
    assert B.beta(z, z) == pytest.approx(0, abs=1e-8)
    assert B.beta(z, w) >= 0
    assert B.beta(z, w) == pytest.approx(B.beta(w, z), abs=1e-12)


@given(tube_pairs())
def test_beta_matches_ball_metric(pair):
    z, w = pair
    b = B.beta(z, w)
    if b < 15:  # beyond that the ball-side arctanh saturates in double precision
        assert b == pytest.approx(B.beta_ball(B.cayley_inv(z), B.cayley_inv(w)), rel=1e-6, abs=1e-8)


def test_beta_invariance_and_triangle(rng):
    for n in (1, 2, 3):
        z, w, v, u = (random_points(rng, n, 1000) for _ in range(4))
        assert np.allclose(B.beta(B.tau(v, z), B.tau(v, w)), B.beta(z, w), atol=1e-8)
        assert np.all(B.beta(z, w) <= B.beta(z, u) + B.beta(u, w) + 1e-9)


def test_beta_upper_bound_violations(rng):
    for n in (1, 2, 3):
        z, w = random_points(rng, n, 10_000), random_points(rng, n, 10_000)
        bound = np.abs(rho(z, w)) / np.sqrt(rho_self(z) * rho_self(w))
        assert int(np.sum(B.beta(z, w) > bound)) == 0
