"""
Enhanced H1-conforming nodal element for the magnetic field.

Scalar nodes: vertices, then (k-1) Legendre moments per edge (global orientation),
then interior moments against P_{k-2}. Vector DOF of node i, component c is ``2*i + c``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Tuple

import numpy as np

from vemmhd.errors import IllConditionedTrace, RankDeficiency, SingularMass
from vemmhd.mesh.polymesh import ElementGeometry
from vemmhd.polybasis.dense import local_solve
from vemmhd.polybasis.monomials import MonomialBasis, diff_matrix, dim_poly, laplacian_matrix
from vemmhd.polybasis.quadrature import QuadRule
from vemmhd.spaces.common import LocalPolyData

logger = logging.getLogger(__name__)

VectorField = Callable[[np.ndarray], np.ndarray]

MIN_EDGE_RATIO = 1e-12


@dataclass(frozen=True)
class MagneticDofLayout:
    k: int
    n_vertices: int

    @property
    def n_edges(self) -> int:
        return self.n_vertices

    @property
    def n_interior_scalar(self) -> int:
        return dim_poly(self.k - 2)

    @property
    def n_scalar(self) -> int:
        return self.n_vertices + (self.k - 1) * self.n_edges + self.n_interior_scalar

    @property
    def count(self) -> int:
        return 2 * self.n_scalar

    def vertex_node(self, v: int) -> int:
        return v

    def edge_node(self, l: int, j: int) -> int:
        return self.n_vertices + (self.k - 1) * l + j

    def interior_node(self, b: int) -> int:
        return self.n_vertices + (self.k - 1) * self.n_edges + b

    @staticmethod
    def dof(node: int, c: int) -> int:
        return 2 * node + c

    def component_dofs(self, c: int) -> np.ndarray:
        return 2 * np.arange(self.n_scalar) + c


@dataclass(frozen=True)
class MagneticProjections:
    geometry: ElementGeometry
    k: int
    layout: MagneticDofLayout
    basis: MonomialBasis
    pnabla: np.ndarray  # (2n, nd)
    p0: np.ndarray  # (2n, nd)
    curl_rep: np.ndarray  # (n1, nd)
    div_rep: np.ndarray  # (n1, nd)
    edge_trace: Tuple[np.ndarray, ...]  # per local edge, (2, k+1, nd)
    dof_of_poly: np.ndarray  # (nd, 2n)
    stiffness: np.ndarray
    mass: np.ndarray
    mass_km1: np.ndarray
    tri_rule: QuadRule
    p0_values: np.ndarray  # (nq, 2, nd)
    curl_values: np.ndarray  # (nq, nd)

    @property
    def n_dofs(self) -> int:
        return self.layout.count


def _block_diag2(a: np.ndarray) -> np.ndarray:
    z = np.zeros_like(a)
    return np.block([[a, z], [z, a]])


class MagneticElement(LocalPolyData):
    def __init__(self, E: ElementGeometry, k: int, trilinear_order: Optional[int] = None) -> None:
        super().__init__(E, k, trilinear_order)
        self.layout = MagneticDofLayout(k=k, n_vertices=E.n_vertices)

    def scalar_dofs(self, values_at: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        rows = [np.atleast_2d(values_at(self.E.vertices))]
        if self.k >= 2:
            for e in self.edges:
                rows.append(e.moments(values_at(e.rule.points), self.k - 2) / e.length)
        rows.append(self.interior_moments(values_at(self.rule.points)))
        return np.vstack(rows)

    def interpolate(self, f: VectorField) -> np.ndarray:
        s = self.scalar_dofs(lambda x: np.asarray(f(x), dtype=float).reshape(len(x), 2))
        return s.reshape(-1)

    @cached_property
    def dof_of_poly(self) -> np.ndarray:
        F = self.scalar_dofs(self.basis.values)
        D = np.zeros((self.layout.count, 2 * self.n))
        for c in range(2):
            D[self.layout.component_dofs(c), c * self.n : (c + 1) * self.n] = F
        return D

    def _vector_from_scalar(self, scalar: np.ndarray) -> np.ndarray:
        rows = scalar.shape[0]
        out = np.zeros((2 * rows, self.layout.count))
        for c in range(2):
            out[c * rows : (c + 1) * rows, self.layout.component_dofs(c)] = scalar
        return out

    @cached_property
    def edge_trace_scalar(self) -> Tuple[np.ndarray, ...]:
        """Per local edge, (k+1, n_scalar) Legendre coefficients of the scalar trace."""
        E, k, lay = self.E, self.k, self.layout
        sigma = (-1.0) ** (k - 1)
        out = []
        for l in range(E.n_edges):
            if E.edge_lengths[l] < MIN_EDGE_RATIO * E.diameter:
                raise IllConditionedTrace(
                    f"edge {l} of cell {E.index} is too short for a trace reconstruction",
                    {"cell": E.index, "edge": l, "length": float(E.edge_lengths[l])},
                )
            T = np.zeros((k + 1, lay.n_scalar))
            for j in range(k - 1):
                T[j, lay.edge_node(l, j)] = 2 * j + 1
            v_start, v_end = E.edge_vertex_locals(l)
            r1 = -((-1.0) ** np.arange(k - 1)) @ T[: k - 1]
            r1[lay.vertex_node(v_start)] += 1.0
            r2 = -T[: k - 1].sum(axis=0)
            r2[lay.vertex_node(v_end)] += 1.0
            T[k - 1] = 0.5 * (sigma * r1 + r2)
            T[k] = 0.5 * (r2 - sigma * r1)
            out.append(T)
        return tuple(out)

    @cached_property
    def edge_trace(self) -> Tuple[np.ndarray, ...]:
        out = []
        for T in self.edge_trace_scalar:
            V = np.zeros((2, self.k + 1, self.layout.count))
            for c in range(2):
                V[c][:, self.layout.component_dofs(c)] = T
            out.append(V)
        return tuple(out)

    @cached_property
    def pnabla_scalar(self) -> np.ndarray:
        E, k, n, lay = self.E, self.k, self.n, self.layout
        G = np.array(self.stiffness)
        G[0, :] = self.boundary_means
        B = np.zeros((n, lay.n_scalar))
        for e, T in zip(self.edges, self.edge_trace_scalar):
            B += self.normal_derivative_moments(e, k) @ T
        if self.n2:
            cols = [lay.interior_node(b) for b in range(self.n2)]
            B[:, cols] -= E.area * laplacian_matrix(k).T / self.h**2
        B[0, :] = sum(e.length * T[0] for e, T in zip(self.edges, self.edge_trace_scalar))
        return local_solve(G, B, error=RankDeficiency, label=f"magnetic Pnabla (cell {E.index})")

    @cached_property
    def pnabla(self) -> np.ndarray:
        return self._vector_from_scalar(self.pnabla_scalar)

    @cached_property
    def p0_scalar(self) -> np.ndarray:
        E, lay = self.E, self.layout
        moments = self.mass @ self.pnabla_scalar
        if self.n2:
            moments[: self.n2] = 0.0
            for b in range(self.n2):
                moments[b, lay.interior_node(b)] = E.area
        return local_solve(self.mass, moments, error=SingularMass, label=f"P_{self.k} mass (cell {E.index})")

    @cached_property
    def p0(self) -> np.ndarray:
        return self._vector_from_scalar(self.p0_scalar)

    @cached_property
    def curl_div_rep(self) -> Tuple[np.ndarray, np.ndarray]:
        E, k, lay = self.E, self.k, self.layout
        nd = lay.count
        curl = np.zeros((self.n1, nd))
        div = np.zeros((self.n1, nd))
        if self.n2:
            d1 = diff_matrix(k - 1, 0).T / self.h
            d2 = diff_matrix(k - 1, 1).T / self.h
            c0 = [lay.dof(lay.interior_node(b), 0) for b in range(self.n2)]
            c1 = [lay.dof(lay.interior_node(b), 1) for b in range(self.n2)]
            curl[:, c0] += E.area * d2
            curl[:, c1] -= E.area * d1
            div[:, c0] -= E.area * d1
            div[:, c1] -= E.area * d2
        for e, V in zip(self.edges, self.edge_trace):
            Z = self.edge_monomial_moments(e, self.n1, k)
            curl += Z @ (e.tangent[0] * V[0] + e.tangent[1] * V[1])
            div += Z @ (e.normal[0] * V[0] + e.normal[1] * V[1])
        label = f"P_{k-1} mass (cell {E.index})"
        return (
            local_solve(self.mass_km1, curl, error=SingularMass, label=label),
            local_solve(self.mass_km1, div, error=SingularMass, label=label),
        )

    def projections(self) -> MagneticProjections:
        V = self.basis.values(self.tri_rule.points)
        n, n1 = self.n, self.n1
        curl_rep, div_rep = self.curl_div_rep
        return MagneticProjections(
            geometry=self.E,
            k=self.k,
            layout=self.layout,
            basis=self.basis,
            pnabla=self.pnabla,
            p0=self.p0,
            curl_rep=curl_rep,
            div_rep=div_rep,
            edge_trace=self.edge_trace,
            dof_of_poly=self.dof_of_poly,
            stiffness=_block_diag2(self.stiffness),
            mass=_block_diag2(self.mass),
            mass_km1=self.mass_km1,
            tri_rule=self.tri_rule,
            p0_values=np.stack([V @ self.p0[:n], V @ self.p0[n:]], axis=1),
            curl_values=V[:, :n1] @ curl_rep,
        )


def mag_dof_count(E: ElementGeometry, k: int) -> int:
    return MagneticDofLayout(k=k, n_vertices=E.n_vertices).count


def mag_edge_trace(E: ElementGeometry, k: int) -> Tuple[np.ndarray, ...]:
    return MagneticElement(E, k).edge_trace


def mag_pnabla(E: ElementGeometry, k: int) -> np.ndarray:
    return MagneticElement(E, k).pnabla


def mag_p0(E: ElementGeometry, k: int) -> np.ndarray:
    return MagneticElement(E, k).p0


def mag_curl_div_rep(E: ElementGeometry, k: int) -> Tuple[np.ndarray, np.ndarray]:
    return MagneticElement(E, k).curl_div_rep


def mag_interpolate(f: VectorField, E: ElementGeometry, k: int) -> np.ndarray:
    return MagneticElement(E, k).interpolate(f)


def build_magnetic_projections(E: ElementGeometry, k: int, trilinear_order: Optional[int] = None) -> MagneticProjections:
    return MagneticElement(E, k, trilinear_order).projections()
