"""Computable error quantities, interpolant states and point sampling."""
from __future__ import annotations

import logging
from typing import Any, Optional, Sequence, Tuple

import numpy as np

from vemmhd.mesh.polymesh import PolyMesh, mesh_size
from vemmhd.polybasis.l2 import l2_project_analytic
from vemmhd.polybasis.monomials import dim_poly
from vemmhd.polybasis.quadrature import polygon_quadrature
from vemmhd.spaces.magnetic import MagneticElement, MagneticProjections, build_magnetic_projections
from vemmhd.spaces.velocity import VelocityElement, VelocityProjections, build_velocity_projections
from vemmhd.system.assembly import LocalBlocks
from vemmhd.system.dofmap import DofMap
from vemmhd.system.state import SolverState
from vemmhd.experiments.report import LevelErrors

logger = logging.getLogger(__name__)

Projections = Sequence[Tuple[VelocityProjections, MagneticProjections]]


def element_projections(
    mesh: PolyMesh, k: int, blocks: Optional[Sequence[LocalBlocks]] = None
) -> Projections:
    if blocks is not None:
        return [(b.vel, b.mag) for b in blocks]
    return [
        (build_velocity_projections(E, k), build_magnetic_projections(E, k)) for E in mesh.geometry
    ]


def _vector_eval(basis, coeffs: np.ndarray, pts: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    n = basis.dim
    V = basis.values(pts)
    G = basis.gradients(pts)
    c = coeffs.reshape(2, n)
    return V @ c.T, np.einsum("qad,ia->qid", G, c)


def compute_errors(
    state: SolverState,
    exact: Any,
    mesh: PolyMesh,
    k: int,
    dofmap: DofMap,
    projections: Optional[Projections] = None,
) -> LevelErrors:
    """
    Errors against ``exact`` (anything with ``u``, ``b`` vector fields and a ``p`` scalar field):
    L2 distances to the Pi0 projections, broken H1 through Pnabla, plain L2 for p, and
    the L2 norm of the elementwise divergence of u_h.
    """
    projections = projections if projections is not None else element_projections(mesh, k)
    n1 = dim_poly(k - 1)
    acc = dict(u0=0.0, u1=0.0, b0=0.0, b1=0.0, p0=0.0, div=0.0)
    for c, (vel, mag) in enumerate(projections):
        E = mesh.geometry[c]
        rule = polygon_quadrature(E, 2 * k + 4)
        w, pts = rule.weights, rule.points
        du = state.u[dofmap.vel_cells[c]]
        db = state.b[dofmap.mag_cells[c]]

        u0, _ = _vector_eval(vel.basis, vel.p0 @ du, pts)
        _, u1 = _vector_eval(vel.basis, vel.pnabla @ du, pts)
        b0, _ = _vector_eval(mag.basis, mag.p0 @ db, pts)
        _, b1 = _vector_eval(mag.basis, mag.pnabla @ db, pts)
        ph = vel.basis.values(pts)[:, :n1] @ state.p[dofmap.p_cells[c]]

        acc["u0"] += float(np.sum(w * np.sum((exact.u.value(pts) - u0) ** 2, axis=1)))
        acc["u1"] += float(np.sum(w * np.sum((exact.u.jacobian(pts) - u1) ** 2, axis=(1, 2))))
        acc["b0"] += float(np.sum(w * np.sum((exact.b.value(pts) - b0) ** 2, axis=1)))
        acc["b1"] += float(np.sum(w * np.sum((exact.b.jacobian(pts) - b1) ** 2, axis=(1, 2))))
        acc["p0"] += float(np.sum(w * (exact.p.value(pts) - ph) ** 2))
        dv = vel.div_rep @ du
        acc["div"] += float(max(dv @ vel.mass_km1 @ dv, 0.0))

    return LevelErrors(
        h=mesh_size(mesh),
        e_u0=np.sqrt(acc["u0"]),
        e_u1=np.sqrt(acc["u1"]),
        e_b0=np.sqrt(acc["b0"]),
        e_b1=np.sqrt(acc["b0"] + acc["b1"]),
        e_p0=np.sqrt(acc["p0"]),
        div_norm=np.sqrt(acc["div"]),
        iterations=state.iterations,
        n_cells=mesh.n_cells,
    )


def interpolant_state(mesh: PolyMesh, k: int, exact: Any, dofmap: DofMap) -> SolverState:
    """DOF interpolants of u and b with the elementwise L2 projection of p; no solve."""
    state = SolverState.zeros(dofmap)
    for c, E in enumerate(mesh.geometry):
        state.u[dofmap.vel_cells[c]] = VelocityElement(E, k).interpolate(exact.u.value)
        state.b[dofmap.mag_cells[c]] = MagneticElement(E, k).interpolate(exact.b.value)
        state.p[dofmap.p_cells[c]] = l2_project_analytic(exact.p.value, E, k - 1)
    return state


def sample_field(
    state: SolverState,
    mesh: PolyMesh,
    dofmap: DofMap,
    points: np.ndarray,
    projections: Projections,
) -> Tuple[np.ndarray, np.ndarray]:
    """Pi0 u_h and Pi0 b_h at ``points``, averaged over every cell whose closure holds the point."""
    points = np.atleast_2d(points)
    u_out = np.zeros((len(points), 2))
    b_out = np.zeros((len(points), 2))
    for i, x in enumerate(points):
        cells = mesh.cells_containing(x)
        if not cells:
            raise ValueError(f"point {x.tolist()} lies outside the mesh")
        for c in cells:
            vel, mag = projections[c]
            u_out[i] += vel.basis.evaluate(vel.p0 @ state.u[dofmap.vel_cells[c]], x[None, :])[0]
            b_out[i] += mag.basis.evaluate(mag.p0 @ state.b[dofmap.mag_cells[c]], x[None, :])[0]
        u_out[i] /= len(cells)
        b_out[i] /= len(cells)
    return u_out, b_out
