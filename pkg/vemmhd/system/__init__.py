from vemmhd.system.assembly import LocalBlocks, OseenAssembler, SparseSystem, assemble_oseen
from vemmhd.system.bc import (
    BCSpec,
    BoundarySegment,
    MagneticCondition,
    VelocityCondition,
    channel_bc,
    homogeneous_bc,
)
from vemmhd.system.dofmap import DofMap, build_dofmap
from vemmhd.system.solver import IncrementNorm, oseen_iterate, solve_linear
from vemmhd.system.state import SolverState

__all__ = [
    "BCSpec",
    "BoundarySegment",
    "DofMap",
    "IncrementNorm",
    "LocalBlocks",
    "MagneticCondition",
    "OseenAssembler",
    "SolverState",
    "SparseSystem",
    "VelocityCondition",
    "assemble_oseen",
    "build_dofmap",
    "channel_bc",
    "homogeneous_bc",
    "oseen_iterate",
    "solve_linear",
]
