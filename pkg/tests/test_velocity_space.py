import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial.legendre import legval

from vemmhd.mesh import quad_mesh
from vemmhd.polybasis.monomials import diff_matrix, dim_poly
from vemmhd.spaces import VelocityElement, vel_dof_count, vel_interpolate, vel_pnabla


def _stream_field(k: int):
    """curl of psi = x^(k+1) y + x y^(k+1) + x^2 y^2: divergence free, degree k+1."""

    def f(x):
        X, Y = x[:, 0], x[:, 1]
        v1 = X ** (k + 1) + (k + 1) * X * Y**k + 2 * X**2 * Y
        v2 = -((k + 1) * X**k * Y + Y ** (k + 1) + 2 * X * Y**2)
        return np.column_stack([v1, v2])

    return f


@pytest.mark.parametrize("k", [1, 2, 3])
def test_dof_count(unit_square, k):
    assert vel_dof_count(unit_square, k) == 2 * (4 * k + dim_poly(k - 2))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_dof_matrix_has_full_column_rank(pentagon, k):
    D = VelocityElement(pentagon, k).dof_of_poly
    assert np.linalg.matrix_rank(D) == 2 * dim_poly(k)


@given(seed=st.integers(0, 2**31 - 1), k=st.integers(1, 3))
def test_projections_reproduce_polynomials(make_polygon, seed, k):
    el = VelocityElement(make_polygon(seed), k)
    eye = np.eye(2 * dim_poly(k))
    np.testing.assert_allclose(el.pnabla @ el.dof_of_poly, eye, atol=1e-8)
    np.testing.assert_allclose(el.p0 @ el.dof_of_poly, eye, atol=1e-8)


@given(seed=st.integers(0, 2**31 - 1), k=st.integers(1, 3))
def test_grad_projection_is_exact_on_polynomials(make_polygon, seed, k):
    el = VelocityElement(make_polygon(seed), k)
    n, n1 = dim_poly(k), dim_poly(k - 1)
    c = np.random.default_rng(seed).standard_normal(2 * n)
    got = el.pgrad @ el.dof_of_poly @ c
    for i in range(2):
        for j in range(2):
            want = diff_matrix(k, j) @ c[i * n : (i + 1) * n] / el.h
            block = 2 * i + j
            np.testing.assert_allclose(got[block * n1 : (block + 1) * n1], want, atol=1e-7 * max(1.0, np.abs(want).max()))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_divergence_of_solenoidal_interpolant_vanishes(pentagon, k):
    el = VelocityElement(pentagon, k)
    dofs = el.interpolate(_stream_field(k))
    np.testing.assert_allclose(el.div_rep @ dofs, 0.0, atol=1e-10)


@pytest.mark.parametrize("k", [1, 2])
def test_normal_trace_matches_polynomial(pentagon, k):
    el = VelocityElement(pentagon, k)
    c = np.random.default_rng(7).standard_normal(2 * el.n)
    dofs = el.dof_of_poly @ c
    for l, e in enumerate(el.edges):
        coeffs = el.normal_trace[l] @ dofs
        want = el.basis.evaluate(c, e.rule.points) @ e.normal
        np.testing.assert_allclose(legval(e.rule.params, coeffs), want, atol=1e-9)


def test_interpolating_a_polynomial_matches_dof_matrix(pentagon):
    el = VelocityElement(pentagon, 2)
    c = np.random.default_rng(3).standard_normal(2 * el.n)
    got = el.interpolate(lambda x: el.basis.evaluate(c, x))
    np.testing.assert_allclose(got, el.dof_of_poly @ c, atol=1e-12)


def test_shared_edge_dofs_agree_across_cells():
    m = quad_mesh(2)
    k = 2

    def f(x):
        return np.column_stack([np.sin(3 * x[:, 0]) + x[:, 1], np.exp(x[:, 0] * x[:, 1])])

    interior = np.flatnonzero(~m.boundary)
    for e in interior:
        c0, c1 = m.edge_cells[e]
        g0, g1 = m.geometry[c0], m.geometry[c1]
        l0 = list(g0.global_edges).index(e)
        l1 = list(g1.global_edges).index(e)
        d0 = vel_interpolate(f, g0, k)
        d1 = vel_interpolate(f, g1, k)
        span = slice(2 * k * l0, 2 * k * (l0 + 1))
        np.testing.assert_allclose(d0[span], d1[2 * k * l1 : 2 * k * (l1 + 1)], atol=1e-13)
        assert np.abs(d0[span]).max() > 0


def test_pnabla_entry_point_shape(unit_square):
    P = vel_pnabla(unit_square, 2)
    assert P.shape == (12, vel_dof_count(unit_square, 2))
