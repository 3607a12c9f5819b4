"""Sparse direct solve and the Oseen fixed-point driver."""
from __future__ import annotations

import logging
from typing import Callable, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from vemmhd.errors import DimensionMismatch, NoConvergence, ResidualTooLarge, SingularSystem
from vemmhd.events import OseenStepEvent
from vemmhd.forms import ModelParams
from vemmhd.mesh.polymesh import PolyMesh
from vemmhd.settings import DEFAULT_MAX_ITER, DEFAULT_TOL
from vemmhd.system.assembly import Field2D, OseenAssembler, SparseSystem
from vemmhd.system.bc import BCSpec
from vemmhd.system.state import SolverState

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-9


def solve_linear(system: SparseSystem) -> np.ndarray:
    """
    Direct sparse LU; asserts ``||Ax - b|| <= 1e-9 ||b||`` (absolute when b = 0).
    """
    A = system.matrix
    b = np.asarray(system.rhs, dtype=float)
    if A.shape[0] != A.shape[1] or A.shape[0] != b.shape[0]:
        raise DimensionMismatch(
            f"matrix {A.shape} and right-hand side {b.shape} are incompatible",
            {"matrix": list(A.shape), "rhs": list(b.shape)},
        )
    if A.shape[0] == 0:
        return np.zeros(0)
    try:
        lu = splu(sp.csc_matrix(A))
    except RuntimeError as e:
        raise SingularSystem(f"sparse factorization failed: {e}", {"n": A.shape[0]}) from e
    x = lu.solve(b)
    if not np.all(np.isfinite(x)):
        raise SingularSystem("sparse solve produced non-finite values", {"n": A.shape[0]})
    bnorm = float(np.linalg.norm(b))
    res = float(np.linalg.norm(A @ x - b))
    rel = res / bnorm if bnorm > 0 else res
    if rel > RESIDUAL_TOL:
        raise ResidualTooLarge(f"linear residual {rel:.3e} exceeds {RESIDUAL_TOL:g}", {"residual": rel})
    logger.debug(f"solved n={A.shape[0]} nnz={A.nnz} residual={rel:.3e}")
    return x


class IncrementNorm:
    """Broken H1 (Pnabla) for u, H1 + L2 for b, L2 for p, assembled once per mesh."""

    def __init__(self, assembler: OseenAssembler) -> None:
        dm = assembler.dofmap
        ru, cu, vu, rb, cb, vb, rp, cp, vp = ([] for _ in range(9))
        for c, blk in enumerate(assembler.blocks):
            Pu = blk.vel.pnabla
            Nu = Pu.T @ blk.vel.stiffness @ Pu
            Pb, P0 = blk.mag.pnabla, blk.mag.p0
            Nb = Pb.T @ blk.mag.stiffness @ Pb + P0.T @ blk.mag.mass @ P0
            for rows, cols, vals, idx, M in (
                (ru, cu, vu, dm.vel_cells[c], Nu),
                (rb, cb, vb, dm.mag_cells[c], Nb),
                (rp, cp, vp, dm.p_cells[c], blk.vel.mass_km1),
            ):
                rows.append(np.repeat(idx, len(idx)))
                cols.append(np.tile(idx, len(idx)))
                vals.append(M.ravel())

        def csr(r, c, v, n):
            return sp.csr_matrix((np.concatenate(v), (np.concatenate(r), np.concatenate(c))), shape=(n, n))

        self.Nu = csr(ru, cu, vu, dm.n_vel)
        self.Nb = csr(rb, cb, vb, dm.n_mag)
        self.Np = csr(rp, cp, vp, dm.n_p)

    def parts(self, state: SolverState) -> Tuple[float, float, float]:
        q = lambda N, x: max(float(x @ (N @ x)), 0.0)  # noqa: E731
        return q(self.Nu, state.u), q(self.Nb, state.b), q(self.Np, state.p)

    def relative(self, new: SolverState, old: SolverState) -> Tuple[float, float, float, float]:
        diff = SolverState(u=new.u - old.u, b=new.b - old.b, p=new.p - old.p)
        du, db, dp = self.parts(diff)
        denom = float(np.sqrt(sum(self.parts(new))))
        scale = denom if denom > 0 else 1.0
        total = float(np.sqrt(du + db + dp)) / scale
        return total, np.sqrt(du) / scale, np.sqrt(db) / scale, np.sqrt(dp) / scale


def oseen_iterate(
    mesh: PolyMesh,
    k: int,
    params: ModelParams,
    bc: BCSpec,
    f: Field2D,
    g: Field2D,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    on_step: Optional[Callable[[OseenStepEvent], None]] = None,
    threads: int = 1,
    assembler: Optional[OseenAssembler] = None,
) -> SolverState:
    """
    Oseen iteration from the zero state; stops when the relative increment drops below ``tol``.

    Raises:
        NoConvergence: after ``max_iter`` steps, carrying the last state and its history.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if assembler is None:
        assembler = OseenAssembler(mesh, k, params, bc, f, g, threads=threads)
    norm = IncrementNorm(assembler)
    dm = assembler.dofmap

    state = SolverState.zeros(dm)
    history = []
    for it in range(1, max_iter + 1):
        system = assembler.system(state)
        x = system.expand(solve_linear(system))
        new = SolverState.from_full(dm, x)
        inc, du, db, dp = norm.relative(new, state)
        history.append(inc)
        new.iterations = it
        new.increment = inc
        new.history = list(history)
        logger.info(f"oseen step {it}: relative increment {inc:.3e}")
        if on_step is not None:
            on_step(OseenStepEvent(it, inc, float(du), float(db), float(dp)))
        state = new
        if inc < tol:
            state.converged = True
            return state

    raise NoConvergence(
        f"Oseen iteration did not reach {tol:g} in {max_iter} steps (last increment {state.increment:.3e})",
        state=state,
        detail={"history": history},
    )
