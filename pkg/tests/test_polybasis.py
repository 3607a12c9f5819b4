import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vemmhd.errors import SingularMass
from vemmhd.polybasis import (
    decompose_Pk2,
    dim_poly,
    edge_quadrature,
    l2_project_analytic,
    monomial_exponents,
    polygon_quadrature,
    scaled_monomials,
)
from vemmhd.polybasis.dense import local_solve
from vemmhd.polybasis.quadrature import triangle_quadrature


def test_exponent_order():
    assert monomial_exponents(2) == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
    assert [dim_poly(k) for k in (-1, 0, 1, 2, 3)] == [0, 1, 3, 6, 10]


def test_scaled_monomials_at_centroid(pentagon):
    basis = scaled_monomials(pentagon, 3)
    v = basis.values(pentagon.centroid[None, :])[0]
    np.testing.assert_allclose(v, np.eye(10)[0])


def test_gradients_match_finite_differences(pentagon):
    basis = scaled_monomials(pentagon, 3)
    x = pentagon.centroid + np.array([0.11, -0.07])
    eps = 1e-6
    fd = np.stack(
        [
            (basis.values(x + [eps, 0]) - basis.values(x - [eps, 0]))[0] / (2 * eps),
            (basis.values(x + [0, eps]) - basis.values(x - [0, eps]))[0] / (2 * eps),
        ],
        axis=-1,
    )
    np.testing.assert_allclose(basis.gradients(x)[0], fd, atol=1e-6)


@pytest.mark.parametrize("order", [0, 1, 2, 4, 7])
def test_triangle_rule_is_exact(order):
    rule = triangle_quadrature(np.array([0.0, 0.0]), np.array([1.0, 0.0]), np.array([0.0, 1.0]), order)
    # integral of x^a y^b over the unit triangle is a! b! / (a + b + 2)!
    from math import factorial

    for a in range(order + 1):
        b = order - a
        exact = factorial(a) * factorial(b) / factorial(a + b + 2)
        got = rule.integrate(rule.points[:, 0] ** a * rule.points[:, 1] ** b)
        assert got == pytest.approx(exact, rel=1e-12)


@given(seed=st.integers(0, 2**31 - 1))
def test_polygon_rule_integrates_area_and_moments(make_polygon, seed):
    E = make_polygon(seed)
    rule = polygon_quadrature(E, 4)
    assert rule.integrate(np.ones(len(rule.weights))) == pytest.approx(E.area, rel=1e-12)
    # first moments vanish about the centroid
    np.testing.assert_allclose(rule.integrate(rule.points - E.centroid), 0.0, atol=1e-10 * E.area * E.diameter)


def test_edge_rule_params_follow_direction():
    rule = edge_quadrature(np.array([0.0, 0.0]), np.array([2.0, 0.0]), 5)
    np.testing.assert_allclose(rule.points[:, 0], rule.params + 1.0)
    assert rule.integrate(rule.points[:, 0] ** 5) == pytest.approx(2.0**6 / 6)


def test_mass_matrix_is_spd(pentagon):
    from vemmhd.polybasis.l2 import mass_matrix

    basis = scaled_monomials(pentagon, 3)
    M = mass_matrix(basis, polygon_quadrature(pentagon, 6))
    np.testing.assert_allclose(M, M.T, atol=1e-15)
    assert np.linalg.eigvalsh(M).min() > 0


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_decomposition_spans_pk2(k, pentagon):
    dec = decompose_Pk2(pentagon, k)
    assert dec.Q.shape == (2 * dim_poly(k), 2 * dim_poly(k))
    assert dec.n_grad + dec.n_rot == 2 * dim_poly(k)
    rng = np.random.default_rng(k)
    p = rng.standard_normal(2 * dim_poly(k))
    np.testing.assert_allclose(dec.from_split(dec.to_split(p)), p, atol=1e-12)


def test_decomposition_rejects_k0(pentagon):
    with pytest.raises(ValueError):
        decompose_Pk2(pentagon, 0)


@given(seed=st.integers(0, 2**31 - 1), k=st.integers(1, 3))
def test_l2_projection_reproduces_polynomials(make_polygon, seed, k):
    E = make_polygon(seed)
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(dim_poly(k))
    basis = scaled_monomials(E, k)
    got = l2_project_analytic(lambda x: basis.values(x) @ coeffs, E, k)
    np.testing.assert_allclose(got, coeffs, atol=1e-8)


def test_l2_projection_vector_is_component_major(unit_square):
    got = l2_project_analytic(lambda x: np.column_stack([np.ones(len(x)), 2 * np.ones(len(x))]), unit_square, 1)
    np.testing.assert_allclose(got, [1, 0, 0, 2, 0, 0], atol=1e-12)


def test_local_solve_raises_on_singular():
    with pytest.raises(SingularMass):
        local_solve(np.array([[1.0, 1.0], [1.0, 1.0]]), np.ones(2))


def test_local_solve_warns_on_ill_conditioned(caplog):
    A = np.diag([1.0, 1e-12])
    with caplog.at_level("WARNING"):
        x = local_solve(A, np.array([1.0, 1e-12]))
    np.testing.assert_allclose(x, [1.0, 1.0])
    assert "ill-conditioned" in caplog.text
