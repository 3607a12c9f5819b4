"""Drivers for the manufactured-solution study and the Hartmann channel."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from vemmhd.experiments.cases import HartmannCase, ManufacturedCase, example1_case
from vemmhd.experiments.norms import compute_errors, element_projections, sample_field
from vemmhd.experiments.report import ErrorReport, LevelErrors
from vemmhd.events import OseenStepEvent
from vemmhd.forms import ModelParams
from vemmhd.mesh.generators import gen_family, quad_mesh
from vemmhd.mesh.polymesh import PolyMesh
from vemmhd.settings import SolverSettings
from vemmhd.system.assembly import OseenAssembler
from vemmhd.system.solver import oseen_iterate
from vemmhd.system.state import SolverState

logger = logging.getLogger(__name__)

StepCallback = Optional[Callable[[OseenStepEvent], None]]


def solve_case(
    mesh: PolyMesh,
    k: int,
    case,
    settings: Optional[SolverSettings] = None,
    on_step: StepCallback = None,
) -> Tuple[SolverState, LevelErrors, OseenAssembler]:
    """Run the Oseen solve of ``case`` on ``mesh`` and measure its errors."""
    settings = settings or SolverSettings()
    assembler = OseenAssembler(mesh, k, case.params, case.bc, case.f, case.g, threads=settings.threads)
    state = oseen_iterate(
        mesh,
        k,
        case.params,
        case.bc,
        case.f,
        case.g,
        tol=settings.tol,
        max_iter=settings.max_iter,
        on_step=on_step,
        assembler=assembler,
    )
    errors = compute_errors(
        state, case, mesh, k, assembler.dofmap, element_projections(mesh, k, assembler.blocks)
    )
    logger.info(
        f"{case.name} k={k} cells={mesh.n_cells}: {state.iterations} Oseen steps, "
        f"|e_u|1={errors.e_u1:.3e}, div={errors.div_norm:.3e}"
    )
    return state, errors, assembler


def convergence_study(
    family: str,
    levels: Sequence[int],
    k: int,
    params: Optional[ModelParams] = None,
    case: Optional[ManufacturedCase] = None,
    settings: Optional[SolverSettings] = None,
    seed: int = 0,
    on_level: Optional[Callable[[int, LevelErrors], None]] = None,
) -> ErrorReport:
    """Solve ``case`` (Example 1 by default) on each level of a mesh family and tabulate errors."""
    case = case or example1_case(params or ModelParams())
    report = ErrorReport()
    for n in levels:
        mesh = gen_family(family, n, seed=seed, domain=case.domain)
        _, errors, _ = solve_case(mesh, k, case, settings)
        report.rows.append(errors)
        if on_level is not None:
            on_level(n, errors)
    return report


@dataclass(frozen=True)
class HartmannResult:
    samples: np.ndarray  # (n, 5): x2, u1_num, u1_ana, b1_num, b1_ana
    errors: LevelErrors
    u_rel_error: float
    b_rel_error: float
    state: SolverState

    @property
    def max_rel_error(self) -> float:
        return max(self.u_rel_error, self.b_rel_error)


def _relative(num: np.ndarray, ana: np.ndarray) -> float:
    scale = float(np.abs(ana).max())
    err = float(np.abs(num - ana).max())
    return err / scale if scale > 0 else err


def hartmann_mesh(case: HartmannCase, mesh_level: int) -> PolyMesh:
    """
    Uniform grid of square cells with n * round(Ha) cells across the channel, so each
    wall layer of width 1/Ha keeps about n/2 cells as Ha grows.
    """
    ny = mesh_level * max(1, int(round(case.Ha)))
    nx = int(round(ny * case.length / (2.0 * case.half_width)))
    return quad_mesh(nx, ny, case.domain)


def run_hartmann(
    case: HartmannCase,
    mesh_level: int,
    k: int,
    settings: Optional[SolverSettings] = None,
    n_samples: int = 41,
    x1: Optional[float] = None,
) -> HartmannResult:
    mesh = hartmann_mesh(case, mesh_level)
    state, errors, assembler = solve_case(mesh, k, case, settings)

    x1 = 0.5 * case.length if x1 is None else x1
    x2 = np.linspace(-case.half_width, case.half_width, n_samples)
    pts = np.column_stack([np.full_like(x2, x1), x2])
    u_num, b_num = sample_field(state, mesh, assembler.dofmap, pts, element_projections(mesh, k, assembler.blocks))
    u_ana = case.u.value(pts)[:, 0]
    b_ana = case.b.value(pts)[:, 0]
    samples = np.column_stack([x2, u_num[:, 0], u_ana, b_num[:, 0], b_ana])
    result = HartmannResult(
        samples=samples,
        errors=errors,
        u_rel_error=_relative(u_num[:, 0], u_ana),
        b_rel_error=_relative(b_num[:, 0], b_ana),
        state=state,
    )
    logger.info(
        f"hartmann Ha={case.Ha:.3g} n={mesh_level} k={k}: "
        f"u1 rel err {result.u_rel_error:.3e}, b1 rel err {result.b_rel_error:.3e}"
    )
    return result
