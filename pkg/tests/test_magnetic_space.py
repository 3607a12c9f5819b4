import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial.legendre import legval

from vemmhd.errors import IllConditionedTrace
from vemmhd.mesh import build_mesh, quad_mesh
from vemmhd.polybasis.monomials import diff_matrix, dim_poly
from vemmhd.spaces import MagneticElement, mag_curl_div_rep, mag_dof_count, mag_interpolate


@pytest.mark.parametrize("k", [1, 2, 3])
def test_dof_count(pentagon, k):
    assert mag_dof_count(pentagon, k) == 2 * 5 + 2 * (k - 1) * 5 + k * (k - 1)


@given(seed=st.integers(0, 2**31 - 1), k=st.integers(1, 3))
def test_projections_reproduce_polynomials(make_polygon, seed, k):
    el = MagneticElement(make_polygon(seed), k)
    eye = np.eye(2 * dim_poly(k))
    assert np.linalg.matrix_rank(el.dof_of_poly) == 2 * dim_poly(k)
    np.testing.assert_allclose(el.pnabla @ el.dof_of_poly, eye, atol=1e-8)
    np.testing.assert_allclose(el.p0 @ el.dof_of_poly, eye, atol=1e-8)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_edge_trace_recovers_polynomial(pentagon, k):
    el = MagneticElement(pentagon, k)
    c = np.random.default_rng(k).standard_normal(2 * el.n)
    dofs = el.dof_of_poly @ c
    for l, e in enumerate(el.edges):
        V = el.edge_trace[l]
        want = el.basis.evaluate(c, e.rule.points)
        for comp in range(2):
            np.testing.assert_allclose(legval(e.rule.params, V[comp] @ dofs), want[:, comp], atol=1e-9)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_curl_and_div_are_exact_on_polynomials(pentagon, k):
    el = MagneticElement(pentagon, k)
    n = el.n
    c = np.random.default_rng(10 + k).standard_normal(2 * n)
    curl_rep, div_rep = mag_curl_div_rep(pentagon, k)
    c1, c2 = c[:n], c[n:]
    curl = (diff_matrix(k, 0) @ c2 - diff_matrix(k, 1) @ c1) / el.h
    div = (diff_matrix(k, 0) @ c1 + diff_matrix(k, 1) @ c2) / el.h
    np.testing.assert_allclose(curl_rep @ el.dof_of_poly @ c, curl, atol=1e-8)
    np.testing.assert_allclose(div_rep @ el.dof_of_poly @ c, div, atol=1e-8)


def test_interpolant_is_node_major(unit_square):
    dofs = mag_interpolate(lambda x: np.column_stack([x[:, 0], 10 + x[:, 1]]), unit_square, 1)
    np.testing.assert_allclose(dofs, [0, 10, 1, 10, 1, 11, 0, 11])


def test_vertex_dofs_are_continuous_across_cells():
    m = quad_mesh(2)

    def f(x):
        return np.column_stack([np.cos(x[:, 0]), x[:, 0] * x[:, 1]])

    values = {}
    for g in m.geometry:
        dofs = mag_interpolate(f, g, 2)
        for local, v in enumerate(m.cells[g.index]):
            got = dofs[2 * local : 2 * local + 2]
            if int(v) in values:
                np.testing.assert_allclose(got, values[int(v)])
            values[int(v)] = got


def test_short_edge_raises_ill_conditioned_trace():
    m = build_mesh([[0, 0], [1, 0], [1, 1], [1 - 1e-13, 1]], [[0, 1, 2, 3]])
    with pytest.raises(IllConditionedTrace):
        MagneticElement(m.geometry[0], 2).edge_trace
