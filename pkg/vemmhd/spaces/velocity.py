"""
Enhanced nonconforming velocity element.

Local DOFs of v on an element with N_e edges:

* per local edge l, component c, j = 0..k-1: (1/|e|) * integral of v_c L_j(s) over e,
  with s in [-1, 1] following the global edge direction (lower vertex index first);
* interior, component c, |b| <= k-2: (1/|E|) * integral of v_c m_b over E.

Edge DOFs of edge l occupy ``[2k*l, 2k*(l+1))`` (component 0 first), interior DOFs follow.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Tuple

import numpy as np

from vemmhd.errors import RankDeficiency, SingularMass
from vemmhd.mesh.polymesh import ElementGeometry
from vemmhd.polybasis.decomposition import decompose_Pk2
from vemmhd.polybasis.dense import local_solve
from vemmhd.polybasis.monomials import MonomialBasis, diff_matrix, dim_poly, exponent_index, laplacian_matrix
from vemmhd.polybasis.quadrature import QuadRule
from vemmhd.spaces.common import LocalPolyData

logger = logging.getLogger(__name__)

VectorField = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class VelocityDofLayout:
    k: int
    n_edges: int

    @property
    def per_edge(self) -> int:
        return 2 * self.k

    @property
    def n_interior_scalar(self) -> int:
        return dim_poly(self.k - 2)

    @property
    def n_scalar(self) -> int:
        return self.k * self.n_edges + self.n_interior_scalar

    @property
    def count(self) -> int:
        return 2 * self.n_scalar

    @property
    def interior_offset(self) -> int:
        return self.per_edge * self.n_edges

    def edge_dof(self, l: int, c: int, j: int) -> int:
        return self.per_edge * l + c * self.k + j

    def edge_dofs(self, l: int) -> np.ndarray:
        return np.arange(self.per_edge * l, self.per_edge * (l + 1))

    def interior_dof(self, c: int, b: int) -> int:
        return self.interior_offset + c * self.n_interior_scalar + b

    def component_dofs(self, c: int) -> np.ndarray:
        """Vector DOF indices of component ``c`` in scalar order (edge moments, then interior)."""
        edge = [self.edge_dof(l, c, j) for l in range(self.n_edges) for j in range(self.k)]
        inner = [self.interior_dof(c, b) for b in range(self.n_interior_scalar)]
        return np.asarray(edge + inner, dtype=np.int64)


@dataclass(frozen=True)
class VelocityProjections:
    """Everything the discrete forms need from one velocity element."""

    geometry: ElementGeometry
    k: int
    layout: VelocityDofLayout
    basis: MonomialBasis
    pnabla: np.ndarray  # (2n, nd)
    p0: np.ndarray  # (2n, nd)
    pgrad: np.ndarray  # (4 n1, nd), blocks d_j v_i in order 00, 01, 10, 11
    div_rep: np.ndarray  # (n1, nd)
    normal_trace: Tuple[np.ndarray, ...]  # per local edge, (k+1, nd) Legendre coefficients
    dof_of_poly: np.ndarray  # (nd, 2n)
    stiffness: np.ndarray  # (2n, 2n) vector H1 seminorm matrix
    mass: np.ndarray  # (2n, 2n)
    mass_km1: np.ndarray  # (n1, n1)
    tri_rule: QuadRule
    p0_values: np.ndarray  # (nq, 2, nd) Pi0 basis functions at tri_rule points
    pgrad_values: np.ndarray  # (nq, 2, 2, nd) [q, i, j] = d_j v_i

    @property
    def n_dofs(self) -> int:
        return self.layout.count


def _block_diag2(a: np.ndarray) -> np.ndarray:
    z = np.zeros_like(a)
    return np.block([[a, z], [z, a]])


class VelocityElement(LocalPolyData):
    def __init__(self, E: ElementGeometry, k: int, trilinear_order: Optional[int] = None) -> None:
        super().__init__(E, k, trilinear_order)
        self.layout = VelocityDofLayout(k=k, n_edges=E.n_edges)

    # --- DOF functionals ---

    def scalar_dofs(self, values_at: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Apply the scalar DOF functionals to ``values_at(points) -> (npts, p)``; shape (n_scalar, p)."""
        rows = []
        for e in self.edges:
            rows.append(e.moments(np.atleast_2d(values_at(e.rule.points)), self.k - 1) / e.length)
        rows.append(self.interior_moments(np.atleast_2d(values_at(self.rule.points))))
        return np.vstack(rows)

    def interpolate(self, f: VectorField) -> np.ndarray:
        s = self.scalar_dofs(lambda x: np.asarray(f(x), dtype=float).reshape(len(x), 2))
        out = np.zeros(self.layout.count)
        for c in range(2):
            out[self.layout.component_dofs(c)] = s[:, c]
        return out

    @cached_property
    def dof_of_poly(self) -> np.ndarray:
        F = self.scalar_dofs(self.basis.values)
        D = np.zeros((self.layout.count, 2 * self.n))
        for c in range(2):
            D[self.layout.component_dofs(c), c * self.n : (c + 1) * self.n] = F
        return D

    def _vector_from_scalar(self, scalar: np.ndarray) -> np.ndarray:
        """Block-diagonal lift of a (rows, n_scalar) operator to (2*rows, nd)."""
        rows = scalar.shape[0]
        out = np.zeros((2 * rows, self.layout.count))
        for c in range(2):
            out[c * rows : (c + 1) * rows, self.layout.component_dofs(c)] = scalar
        return out

    # --- projections ---

    @cached_property
    def pnabla_scalar(self) -> np.ndarray:
        E, k, n = self.E, self.k, self.n
        G = np.array(self.stiffness)
        G[0, :] = self.boundary_means
        B = np.zeros((n, self.layout.n_scalar))
        weights = 2.0 * np.arange(k) + 1.0
        for l, e in enumerate(self.edges):
            B[:, l * k : (l + 1) * k] = self.normal_derivative_moments(e, k - 1) * weights
        if self.n2:
            B[:, k * E.n_edges :] = -E.area * laplacian_matrix(k).T / self.h**2
        B[0, :] = 0.0
        for l, e in enumerate(self.edges):
            B[0, l * k] = e.length
        return local_solve(G, B, error=RankDeficiency, label=f"velocity Pnabla (cell {E.index})")

    @cached_property
    def pnabla(self) -> np.ndarray:
        return self._vector_from_scalar(self.pnabla_scalar)

    @cached_property
    def pgrad(self) -> np.ndarray:
        E, k, lay = self.E, self.k, self.layout
        weights = 2.0 * np.arange(k) + 1.0
        edge_w = [self.edge_monomial_moments(e, self.n1, k - 1) * weights for e in self.edges]
        blocks = []
        for i in range(2):
            for j in range(2):
                rhs = np.zeros((self.n1, lay.count))
                if self.n2:
                    d = diff_matrix(k - 1, j) / self.h
                    cols = [lay.interior_dof(i, b) for b in range(self.n2)]
                    rhs[:, cols] = -E.area * d.T
                for l, e in enumerate(self.edges):
                    cols = [lay.edge_dof(l, i, m) for m in range(k)]
                    rhs[:, cols] += e.normal[j] * edge_w[l]
                blocks.append(rhs)
        rhs = np.vstack(blocks)
        out = np.zeros_like(rhs)
        for b in range(4):
            sl = slice(b * self.n1, (b + 1) * self.n1)
            out[sl] = local_solve(self.mass_km1, rhs[sl], error=SingularMass, label=f"P_{k-1} mass (cell {E.index})")
        return out

    @cached_property
    def div_rep(self) -> np.ndarray:
        n1 = self.n1
        return self.pgrad[:n1] + self.pgrad[3 * n1 :]

    @cached_property
    def normal_trace(self) -> Tuple[np.ndarray, ...]:
        k, n, lay = self.k, self.n, self.layout
        out = []
        for l, e in enumerate(self.edges):
            T = np.zeros((k + 1, lay.count))
            for j in range(k):
                for c in range(2):
                    T[j, lay.edge_dof(l, c, j)] = (2 * j + 1) * e.normal[c]
            top = e.rule.integrate(e.values[:, :n] * e.legendre[:, k, None])
            for c in range(2):
                T[k] += e.normal[c] * (top @ self.pnabla[c * n : (c + 1) * n])
            T[k] *= (2 * k + 1) / e.length
            out.append(T)
        return tuple(out)

    @cached_property
    def p0(self) -> np.ndarray:
        E, k, n, lay = self.E, self.k, self.n, self.layout
        dec = decompose_Pk2(E, k)
        n_up = self.basis_up.dim

        grad_mom = -self.mass_up_km1 @ self.div_rep
        for l, e in enumerate(self.edges):
            Y = self.edge_monomial_moments(e, n_up, k)
            grad_mom = grad_mom + Y @ self.normal_trace[l]
        split = [self.h * grad_mom[1:]]

        idx2 = exponent_index(k - 2) if k >= 2 else {}
        idx = exponent_index(k)
        M_vec = _block_diag2(self.mass)
        for b in dec.rot_exponents:
            if sum(b) <= k - 3:
                row = np.zeros(lay.count)
                row[lay.interior_dof(0, idx2[(b[0], b[1] + 1)])] = -E.area
                row[lay.interior_dof(1, idx2[(b[0] + 1, b[1])])] = E.area
            else:
                r = np.zeros(2 * n)
                r[idx[(b[0], b[1] + 1)]] = -1.0
                r[n + idx[(b[0] + 1, b[1])]] = 1.0
                row = (M_vec @ r) @ self.pnabla
            split.append(row[None, :])

        moments = dec.Q_inv.T @ np.vstack(split)
        return local_solve(M_vec, moments, error=SingularMass, label=f"[P_{k}]^2 mass (cell {E.index})")

    def projections(self) -> VelocityProjections:
        pts = self.tri_rule.points
        V = self.basis.values(pts)
        n, n1 = self.n, self.n1
        p0_values = np.stack([V @ self.p0[:n], V @ self.p0[n:]], axis=1)
        W = V[:, :n1]
        pg = self.pgrad
        pgrad_values = np.stack(
            [
                np.stack([W @ pg[0:n1], W @ pg[n1 : 2 * n1]], axis=1),
                np.stack([W @ pg[2 * n1 : 3 * n1], W @ pg[3 * n1 :]], axis=1),
            ],
            axis=1,
        )
        return VelocityProjections(
            geometry=self.E,
            k=self.k,
            layout=self.layout,
            basis=self.basis,
            pnabla=self.pnabla,
            p0=self.p0,
            pgrad=pg,
            div_rep=self.div_rep,
            normal_trace=self.normal_trace,
            dof_of_poly=self.dof_of_poly,
            stiffness=_block_diag2(self.stiffness),
            mass=_block_diag2(self.mass),
            mass_km1=self.mass_km1,
            tri_rule=self.tri_rule,
            p0_values=p0_values,
            pgrad_values=pgrad_values,
        )


# --- operation-level entry points ---


def vel_dof_count(E: ElementGeometry, k: int) -> int:
    return VelocityDofLayout(k=k, n_edges=E.n_edges).count


def vel_pnabla(E: ElementGeometry, k: int) -> np.ndarray:
    return VelocityElement(E, k).pnabla


def vel_div_rep(E: ElementGeometry, k: int) -> Tuple[np.ndarray, Tuple[np.ndarray, ...]]:
    el = VelocityElement(E, k)
    return el.div_rep, el.normal_trace


def vel_p0(E: ElementGeometry, k: int) -> np.ndarray:
    return VelocityElement(E, k).p0


def vel_grad_p0(E: ElementGeometry, k: int) -> np.ndarray:
    return VelocityElement(E, k).pgrad


def vel_interpolate(f: VectorField, E: ElementGeometry, k: int) -> np.ndarray:
    return VelocityElement(E, k).interpolate(f)


def build_velocity_projections(E: ElementGeometry, k: int, trilinear_order: Optional[int] = None) -> VelocityProjections:
    return VelocityElement(E, k, trilinear_order).projections()
