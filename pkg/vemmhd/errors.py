"""Exception hierarchy shared by every vemmhd subpackage."""
from __future__ import annotations

from typing import Any, Dict, Optional


class VemError(Exception):
    """Base error. ``code`` is the machine-readable tag printed by the CLI."""

    code: str = "vem"

    def __init__(self, message: str, detail: Optional[Dict[str, Any]] = None) -> None:
        self.message = message
        self.detail = detail or {}
        super().__init__(message)


# --- configuration -----------------------------------------------------------


class ConfigError(VemError):
    code = "config"


# --- mesh --------------------------------------------------------------------


class MeshError(VemError):
    code = "mesh"


class NonManifoldEdge(MeshError):
    code = "non_manifold_edge"


class SelfIntersectingCell(MeshError):
    code = "self_intersecting_cell"


class DegenerateCell(MeshError):
    code = "degenerate_cell"


class MeshFormatError(MeshError):
    code = "mesh_format"


# --- local and global numerics ----------------------------------------------


class NumericalError(VemError):
    code = "numerical"


class SingularDecomposition(NumericalError):
    code = "singular_decomposition"


class SingularMass(NumericalError):
    code = "singular_mass"


class RankDeficiency(NumericalError):
    code = "rank_deficiency"


class IllConditionedTrace(NumericalError):
    code = "ill_conditioned_trace"


class DimensionMismatch(NumericalError):
    code = "dimension_mismatch"


class SingularSystem(NumericalError):
    code = "singular_system"


class ResidualTooLarge(NumericalError):
    code = "residual_too_large"


# --- boundary conditions and iteration --------------------------------------


class InconsistentBC(VemError):
    code = "inconsistent_bc"


class NoConvergence(NumericalError):
    """Raised by the Oseen driver; ``state`` keeps the last iterate and its history."""

    code = "no_convergence"

    def __init__(self, message: str, state: Any = None, detail: Optional[Dict[str, Any]] = None) -> None:
        self.state = state
        super().__init__(message, detail)
