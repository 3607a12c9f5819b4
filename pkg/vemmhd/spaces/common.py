"""Polynomial data shared by the velocity and magnetic element builders."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import List, Tuple

import numpy as np
from numpy.polynomial.legendre import legvander

from vemmhd.mesh.polymesh import ElementGeometry
from vemmhd.polybasis.l2 import mass_matrix, stiffness_matrix
from vemmhd.polybasis.monomials import MonomialBasis, dim_poly, scaled_monomials
from vemmhd.polybasis.quadrature import QuadRule, edge_quadrature, polygon_quadrature


@dataclass(frozen=True)
class EdgeData:
    """Gauss rule on one local edge in global orientation, with tabulated bases."""

    rule: QuadRule
    legendre: np.ndarray  # (nq, k+1) L_j(s)
    values: np.ndarray  # (nq, dim P_{k+1}) monomials
    gradients: np.ndarray  # (nq, dim P_k, 2)
    length: float
    normal: np.ndarray
    tangent: np.ndarray

    def moments(self, f_values: np.ndarray, degree: int) -> np.ndarray:
        """(degree+1, ...) integrals of f against L_0..L_degree."""
        return self.rule.integrate(self.legendre[:, : degree + 1, None] * f_values[:, None, :])


class LocalPolyData:
    def __init__(self, E: ElementGeometry, k: int, trilinear_order: int | None = None) -> None:
        if k < 1:
            raise ValueError("element degree must be >= 1")
        self.E = E
        self.k = k
        self.h = E.diameter
        self.n = dim_poly(k)
        self.n1 = dim_poly(k - 1)
        self.n2 = dim_poly(k - 2)
        self.basis: MonomialBasis = scaled_monomials(E, k)
        self.basis_up: MonomialBasis = scaled_monomials(E, k + 1)
        self.rule = polygon_quadrature(E, 2 * k + 2)
        self.tri_rule = polygon_quadrature(E, trilinear_order if trilinear_order else max(3 * k, 2 * k + 2))

    @cached_property
    def mass(self) -> np.ndarray:
        return mass_matrix(self.basis, self.rule)

    @cached_property
    def mass_km1(self) -> np.ndarray:
        return np.array(self.mass[: self.n1, : self.n1])

    @cached_property
    def mass_up_km1(self) -> np.ndarray:
        """(dim P_{k+1}, dim P_{k-1}) integrals of m_a * m_g."""
        up = self.basis_up.values(self.rule.points)
        low = up[:, : self.n1]
        return (up * self.rule.weights[:, None]).T @ low

    @cached_property
    def stiffness(self) -> np.ndarray:
        return stiffness_matrix(self.basis, self.rule)

    @cached_property
    def interior_values(self) -> np.ndarray:
        return self.basis.values(self.rule.points)

    @cached_property
    def edges(self) -> Tuple[EdgeData, ...]:
        out: List[EdgeData] = []
        for l in range(self.E.n_edges):
            a, b = self.E.edge_endpoints(l)
            rule = edge_quadrature(a, b, 2 * self.k + 2)
            out.append(
                EdgeData(
                    rule=rule,
                    legendre=legvander(rule.params, self.k),
                    values=self.basis_up.values(rule.points),
                    gradients=self.basis.gradients(rule.points),
                    length=float(self.E.edge_lengths[l]),
                    normal=self.E.normals[l],
                    tangent=self.E.tangents[l],
                )
            )
        return tuple(out)

    @cached_property
    def boundary_means(self) -> np.ndarray:
        """Integral of each P_k monomial over the element boundary."""
        return sum(e.rule.integrate(e.values[:, : self.n]) for e in self.edges)

    def normal_derivative_moments(self, e: EdgeData, degree: int) -> np.ndarray:
        """(dim P_k, degree+1) integrals of (grad m_a . n) L_j."""
        dn = e.gradients @ e.normal
        return e.moments(dn, degree).T

    def edge_monomial_moments(self, e: EdgeData, n_mono: int, degree: int) -> np.ndarray:
        """(n_mono, degree+1) integrals of m_a L_j."""
        return e.moments(e.values[:, :n_mono], degree).T

    def interior_moments(self, values: np.ndarray) -> np.ndarray:
        """(dim P_{k-2}, p) scaled moments (1/|E|) of tabulated values against P_{k-2}."""
        v = self.interior_values[:, : self.n2]
        return (v * self.rule.weights[:, None]).T @ values / self.E.area
