"""
Global numbering of the unknowns (u | b | p | multiplier) and boundary-constraint elimination.

Constraints are removed through an affine map ``x = T y + x0``: every constrained
velocity DOF is fixed to zero, and every constrained magnetic node (two components)
keeps only the null space of its stacked constraint rows.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np
import scipy.sparse as sp
from numpy.polynomial.legendre import legvander

from vemmhd.errors import InconsistentBC
from vemmhd.mesh.polymesh import PolyMesh
from vemmhd.polybasis.monomials import dim_poly
from vemmhd.polybasis.quadrature import edge_quadrature
from vemmhd.system.bc import BCSpec, MagneticCondition, VelocityCondition

logger = logging.getLogger(__name__)

RANK_TOL = 1e-12
CONFLICT_TOL = 1e-10


@dataclass(frozen=True)
class DofMap:
    k: int
    n_vel: int
    n_mag: int
    n_p: int
    has_multiplier: bool
    vel_cells: Tuple[np.ndarray, ...]
    mag_cells: Tuple[np.ndarray, ...]
    p_cells: Tuple[np.ndarray, ...]
    segment_of_edge: np.ndarray
    transform: sp.csr_matrix
    shift: np.ndarray
    free_offsets: Tuple[int, int, int, int, int]

    @property
    def n_full(self) -> int:
        return self.n_vel + self.n_mag + self.n_p + int(self.has_multiplier)

    @property
    def n_free(self) -> int:
        return self.transform.shape[1]

    @property
    def mag_offset(self) -> int:
        return self.n_vel

    @property
    def p_offset(self) -> int:
        return self.n_vel + self.n_mag

    @property
    def multiplier_index(self) -> int:
        return self.n_vel + self.n_mag + self.n_p

    def expand(self, y: np.ndarray) -> np.ndarray:
        return self.transform @ y + self.shift

    def split(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, float]:
        u = x[: self.n_vel]
        b = x[self.n_vel : self.p_offset]
        p = x[self.p_offset : self.p_offset + self.n_p]
        lam = float(x[self.multiplier_index]) if self.has_multiplier else 0.0
        return u, b, p, lam


def _vel_cells(mesh: PolyMesh, k: int) -> Tuple[List[np.ndarray], int]:
    n2 = dim_poly(k - 2)
    interior0 = 2 * k * mesh.n_edges
    out = []
    for c, edges in enumerate(mesh.cell_edges):
        idx = [g * 2 * k + i for g in edges for i in range(2 * k)]
        idx += [interior0 + c * 2 * n2 + i for i in range(2 * n2)]
        out.append(np.asarray(idx, dtype=np.int64))
    return out, interior0 + mesh.n_cells * 2 * n2


def _mag_cells(mesh: PolyMesh, k: int) -> Tuple[List[np.ndarray], int]:
    n2 = dim_poly(k - 2)
    nv, ne = mesh.n_vertices, mesh.n_edges
    out = []
    for c, loop in enumerate(mesh.cells):
        nodes = list(loop)
        nodes += [nv + g * (k - 1) + j for g in mesh.cell_edges[c] for j in range(k - 1)]
        nodes += [nv + (k - 1) * ne + c * n2 + b for b in range(n2)]
        idx = [2 * node + comp for node in nodes for comp in range(2)]
        out.append(np.asarray(idx, dtype=np.int64))
    n_nodes = nv + (k - 1) * ne + mesh.n_cells * n2
    return out, 2 * n_nodes


def _solve_node(rows: List[np.ndarray], values: List[float], node: int) -> Tuple[np.ndarray, np.ndarray]:
    """Particular solution and null-space basis (2, r) of the stacked node constraints."""
    A = np.vstack(rows)
    g = np.asarray(values, dtype=float)
    _, s, vt = np.linalg.svd(A)
    rank = int(np.sum(s > RANK_TOL * max(s.max(), 1.0)))
    x0 = np.linalg.pinv(A, rcond=RANK_TOL) @ g
    residual = float(np.linalg.norm(A @ x0 - g))
    if residual > CONFLICT_TOL * max(1.0, float(np.linalg.norm(g))):
        raise InconsistentBC(
            f"magnetic boundary conditions conflict at node {node} (residual {residual:.3e})",
            {"node": node, "residual": residual},
        )
    return x0, vt[rank:].T


def build_dofmap(mesh: PolyMesh, k: int, bc: BCSpec) -> DofMap:
    segment_of_edge = bc.classify(mesh)
    vel_cells, n_vel = _vel_cells(mesh, k)
    mag_cells, n_mag = _mag_cells(mesh, k)
    n1 = dim_poly(k - 1)
    n_p = mesh.n_cells * n1
    p_cells = [np.arange(c * n1, (c + 1) * n1, dtype=np.int64) for c in range(mesh.n_cells)]
    has_multiplier = not bc.has_natural_velocity

    vel_fixed = np.zeros(n_vel, dtype=bool)
    node_rows: Dict[int, List[np.ndarray]] = {}
    node_vals: Dict[int, List[float]] = {}

    def add(node: int, row: np.ndarray, value: float) -> None:
        node_rows.setdefault(node, []).append(row)
        node_vals.setdefault(node, []).append(value)

    nv = mesh.n_vertices
    for e in mesh.boundary_edges:
        seg = bc.segments[segment_of_edge[e]]
        if seg.velocity == VelocityCondition.dirichlet_zero:
            vel_fixed[e * 2 * k : (e + 1) * 2 * k] = True

        cell = int(mesh.edge_cells[e, 0])
        geom = mesh.geometry[cell]
        l = int(np.flatnonzero(geom.global_edges == e)[0])
        n, t = geom.normals[l], geom.tangents[l]
        a, b = mesh.edges[e]
        start, end = mesh.vertices[a], mesh.vertices[b]
        edge_nodes = [nv + e * (k - 1) + j for j in range(k - 1)]

        if MagneticCondition.normal_zero in seg.magnetic:
            for node in (int(a), int(b), *edge_nodes):
                add(node, n, 0.0)
        if MagneticCondition.tangential_prescribed in seg.magnetic:
            ends = np.asarray(seg.b_d(np.vstack([start, end])), dtype=float).reshape(2, 2)
            add(int(a), t, float(ends[0] @ t))
            add(int(b), t, float(ends[1] @ t))
            if k >= 2:
                rule = edge_quadrature(start, end, 2 * k + 2)
                bt = np.asarray(seg.b_d(rule.points), dtype=float).reshape(-1, 2) @ t
                L = legvander(rule.params, k - 2)
                moments = rule.integrate(L * bt[:, None]) / geom.edge_lengths[l]
                for j, node in enumerate(edge_nodes):
                    add(node, t, float(moments[j]))

    n_full = n_vel + n_mag + n_p + int(has_multiplier)
    shift = np.zeros(n_full)
    rows: List[int] = []
    cols: List[int] = []
    vals: List[float] = []
    block_starts: List[int] = []
    col = 0

    def free(i: int) -> None:
        nonlocal col
        rows.append(i)
        cols.append(col)
        vals.append(1.0)
        col += 1

    block_starts.append(col)
    for i in range(n_vel):
        if not vel_fixed[i]:
            free(i)

    block_starts.append(col)
    node_solutions = {node: _solve_node(node_rows[node], node_vals[node], node) for node in sorted(node_rows)}
    for node in range(n_mag // 2):
        i0 = n_vel + 2 * node
        if node not in node_solutions:
            free(i0)
            free(i0 + 1)
            continue
        x0, null = node_solutions[node]
        shift[i0 : i0 + 2] = x0
        for r in range(null.shape[1]):
            for comp in range(2):
                if abs(null[comp, r]) > 0.0:
                    rows.append(i0 + comp)
                    cols.append(col)
                    vals.append(float(null[comp, r]))
            col += 1

    block_starts.append(col)
    for i in range(n_vel + n_mag, n_full):
        if i == n_vel + n_mag + n_p:
            block_starts.append(col)
        free(i)
    if not has_multiplier:
        block_starts.append(col)
    block_starts.append(col)

    T = sp.csr_matrix((vals, (rows, cols)), shape=(n_full, col))
    dm = DofMap(
        k=k,
        n_vel=n_vel,
        n_mag=n_mag,
        n_p=n_p,
        has_multiplier=has_multiplier,
        vel_cells=tuple(vel_cells),
        mag_cells=tuple(mag_cells),
        p_cells=tuple(p_cells),
        segment_of_edge=segment_of_edge,
        transform=T,
        shift=shift,
        free_offsets=tuple(block_starts),  # type: ignore[arg-type]
    )
    logger.info(
        f"dofmap k={k}: {n_full} unknowns, {col} free "
        f"(u {block_starts[1] - block_starts[0]}, b {block_starts[2] - block_starts[1]}, "
        f"p {block_starts[3] - block_starts[2]}, multiplier {int(has_multiplier)})"
    )
    return dm
