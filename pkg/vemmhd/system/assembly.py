"""Element loop and global assembly of the Oseen-linearized MHD system."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from numpy.polynomial.legendre import legvander

from vemmhd.forms import ModelParams, local_a0, local_a1, local_c2, local_c3, local_d, local_rhs
from vemmhd.mesh.polymesh import PolyMesh
from vemmhd.polybasis.quadrature import edge_quadrature
from vemmhd.spaces.magnetic import MagneticProjections, build_magnetic_projections
from vemmhd.spaces.velocity import VelocityProjections, build_velocity_projections
from vemmhd.system.bc import BCSpec, VelocityCondition
from vemmhd.system.dofmap import DofMap, build_dofmap
from vemmhd.system.state import SolverState

logger = logging.getLogger(__name__)

Field2D = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class LocalBlocks:
    vel: VelocityProjections
    mag: MagneticProjections
    A0: np.ndarray
    A1: np.ndarray
    D: np.ndarray
    rhs_f: np.ndarray
    rhs_g: np.ndarray
    mean: np.ndarray  # integrals of the pressure basis over the cell


@dataclass(frozen=True)
class SparseSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    offsets: Tuple[int, int, int, int, int]
    dofmap: DofMap

    @property
    def shape(self) -> Tuple[int, int]:
        return self.matrix.shape

    def expand(self, y: np.ndarray) -> np.ndarray:
        return self.dofmap.expand(y)


class _Triplets:
    def __init__(self) -> None:
        self.rows: List[np.ndarray] = []
        self.cols: List[np.ndarray] = []
        self.vals: List[np.ndarray] = []

    def add(self, rows: np.ndarray, cols: np.ndarray, block: np.ndarray) -> None:
        if block.size == 0:
            return
        self.rows.append(np.repeat(rows, len(cols)))
        self.cols.append(np.tile(cols, len(rows)))
        self.vals.append(np.asarray(block).ravel())

    def to_csr(self, n: int) -> sp.csr_matrix:
        if not self.rows:
            return sp.csr_matrix((n, n))
        return sp.csr_matrix(
            (np.concatenate(self.vals), (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=(n, n),
        )


def _edge_legendre_scale(k: int) -> np.ndarray:
    return 2.0 * np.arange(k) + 1.0


class OseenAssembler:
    """
    Holds the per-element projections and every block that does not depend on the
    previous iterate; ``system(prev)`` adds convection and coupling around ``prev``.
    """

    def __init__(
        self,
        mesh: PolyMesh,
        k: int,
        params: ModelParams,
        bc: BCSpec,
        f: Field2D,
        g: Field2D,
        threads: int = 1,
        trilinear_order: Optional[int] = None,
        dofmap: Optional[DofMap] = None,
    ) -> None:
        self.mesh = mesh
        self.k = k
        self.params = params
        self.bc = bc
        self.dofmap = dofmap if dofmap is not None else build_dofmap(mesh, k, bc)

        def build(c: int) -> LocalBlocks:
            E = mesh.geometry[c]
            vel = build_velocity_projections(E, k, trilinear_order)
            mag = build_magnetic_projections(E, k, trilinear_order)
            rhs_f, rhs_g = local_rhs(vel, mag, f, g)
            return LocalBlocks(
                vel=vel,
                mag=mag,
                A0=local_a0(vel, params),
                A1=local_a1(mag, params),
                D=local_d(vel),
                rhs_f=rhs_f,
                rhs_g=rhs_g,
                mean=np.array(vel.mass_km1[0]),
            )

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                self.blocks: Tuple[LocalBlocks, ...] = tuple(pool.map(build, range(mesh.n_cells)))
        else:
            self.blocks = tuple(build(c) for c in range(mesh.n_cells))
        logger.info(f"built local blocks for {mesh.n_cells} cells (k={k}, threads={threads})")

        self._natural_edges = self._collect_natural_edges()
        self.static_matrix, self.static_rhs = self._assemble_static()

    # --- static part ---

    def _collect_natural_edges(self) -> List[Tuple[int, int, int]]:
        """(global edge, cell, local edge) of every natural-pressure boundary edge."""
        out = []
        seg_of = self.dofmap.segment_of_edge
        for e in self.mesh.boundary_edges:
            if self.bc.segments[seg_of[e]].velocity != VelocityCondition.natural_pressure:
                continue
            cell = int(self.mesh.edge_cells[e, 0])
            l = int(np.flatnonzero(self.mesh.geometry[cell].global_edges == e)[0])
            out.append((int(e), cell, l))
        return out

    def _assemble_static(self) -> Tuple[sp.csr_matrix, np.ndarray]:
        dm = self.dofmap
        trip = _Triplets()
        rhs = np.zeros(dm.n_full)
        for c, blk in enumerate(self.blocks):
            iu = dm.vel_cells[c]
            ib = dm.mag_offset + dm.mag_cells[c]
            ip = dm.p_offset + dm.p_cells[c]
            trip.add(iu, iu, blk.A0)
            trip.add(ib, ib, blk.A1)
            trip.add(iu, ip, -blk.D.T)
            trip.add(ip, iu, blk.D)
            if dm.has_multiplier:
                lam = np.array([dm.multiplier_index])
                trip.add(ip, lam, blk.mean[:, None])
                trip.add(lam, ip, blk.mean[None, :])
            np.add.at(rhs, iu, blk.rhs_f)
            np.add.at(rhs, ib, blk.rhs_g)

        k = self.k
        scale = _edge_legendre_scale(k)
        for e, cell, l in self._natural_edges:
            geom = self.mesh.geometry[cell]
            seg = self.bc.segments[dm.segment_of_edge[e]]
            a, b = geom.edge_endpoints(l)
            rule = edge_quadrature(a, b, 2 * k + 2)
            L = legvander(rule.params, k - 1)
            pd = np.asarray(seg.p_d(rule.points), dtype=float).reshape(-1)
            coeffs = scale / geom.edge_lengths[l] * rule.integrate(L * pd[:, None])
            for comp in range(2):
                idx = e * 2 * k + comp * k + np.arange(k)
                rhs[idx] -= coeffs * geom.edge_lengths[l] * geom.normals[l][comp]
        return trip.to_csr(dm.n_full), rhs

    # --- iterate-dependent part ---

    def _outflow_matrix(self, prev: SolverState) -> sp.csr_matrix:
        """Linearized 1/2 * boundary integral of (u_prev . n)(u . v) on natural edges."""
        dm, k = self.dofmap, self.k
        trip = _Triplets()
        scale = _edge_legendre_scale(k)
        for e, cell, l in self._natural_edges:
            geom = self.mesh.geometry[cell]
            a, b = geom.edge_endpoints(l)
            rule = edge_quadrature(a, b, 3 * k)
            L = legvander(rule.params, k - 1) * scale
            base = e * 2 * k
            u_prev = prev.u[base : base + 2 * k].reshape(2, k)
            beta = (L @ u_prev.T) @ geom.normals[l]
            N = 0.5 * np.einsum("q,q,qi,qj->ij", rule.weights, beta, L, L)
            for comp in range(2):
                idx = base + comp * k + np.arange(k)
                trip.add(idx, idx, N)
        return trip.to_csr(dm.n_full)

    def convective_matrix(self, prev: SolverState) -> sp.csr_matrix:
        dm = self.dofmap
        trip = _Triplets()
        if np.any(prev.u) or np.any(prev.b):
            for c, blk in enumerate(self.blocks):
                iu = dm.vel_cells[c]
                ib = dm.mag_offset + dm.mag_cells[c]
                trip.add(iu, iu, local_c2(blk.vel, prev.u[dm.vel_cells[c]]))
                C3a, C3b = local_c3(blk.vel, blk.mag, prev.b[dm.mag_cells[c]], self.params)
                trip.add(iu, ib, C3a)
                trip.add(ib, iu, C3b)
        out = trip.to_csr(dm.n_full)
        if self.bc.convective_outflow_term and self._natural_edges and np.any(prev.u):
            out = out + self._outflow_matrix(prev)
        return out

    def system(self, prev: Optional[SolverState] = None) -> SparseSystem:
        dm = self.dofmap
        prev = prev if prev is not None else SolverState.zeros(dm)
        K = self.static_matrix + self.convective_matrix(prev)
        T = dm.transform
        reduced = (T.T @ K @ T).tocsr()
        reduced.eliminate_zeros()
        rhs = T.T @ (self.static_rhs - K @ dm.shift)
        return SparseSystem(matrix=reduced, rhs=np.asarray(rhs).ravel(), offsets=dm.free_offsets, dofmap=dm)


def assemble_oseen(
    mesh: PolyMesh,
    k: int,
    params: ModelParams,
    prev: Optional[SolverState],
    bc: BCSpec,
    f: Field2D,
    g: Field2D,
    assembler: Optional[OseenAssembler] = None,
) -> SparseSystem:
    """Assemble the reduced Oseen system around ``prev`` (zero state when None)."""
    if assembler is None:
        assembler = OseenAssembler(mesh, k, params, bc, f, g)
    return assembler.system(prev)
