"""Boundary segments and the conditions they carry."""
from __future__ import annotations

import enum
import logging
from typing import Callable, List, Optional, Set

import numpy as np
from pydantic import BaseModel, Field

from vemmhd.errors import InconsistentBC
from vemmhd.mesh.polymesh import PolyMesh

logger = logging.getLogger(__name__)

Selector = Callable[[np.ndarray], bool]
ScalarData = Callable[[np.ndarray], np.ndarray]
VectorData = Callable[[np.ndarray], np.ndarray]


class VelocityCondition(str, enum.Enum):
    dirichlet_zero = "dirichlet_zero"
    natural_pressure = "natural_pressure"


class MagneticCondition(str, enum.Enum):
    normal_zero = "normal_zero"
    tangential_prescribed = "tangential_prescribed"


def everywhere(_: np.ndarray) -> bool:
    return True


class BoundarySegment(BaseModel):
    name: str
    selector: Selector = Field(description="Predicate on the edge midpoint")
    velocity: VelocityCondition
    magnetic: Set[MagneticCondition] = Field(default_factory=set)
    p_d: Optional[ScalarData] = Field(default=None, description="Prescribed pressure on natural segments")
    b_d: Optional[VectorData] = Field(default=None, description="Magnetic field whose tangential part is imposed")


class BCSpec(BaseModel):
    segments: List[BoundarySegment]
    convective_outflow_term: bool = True

    @property
    def has_natural_velocity(self) -> bool:
        return any(s.velocity == VelocityCondition.natural_pressure for s in self.segments)

    def validate_segments(self) -> None:
        for s in self.segments:
            if not s.magnetic:
                raise InconsistentBC(f"segment {s.name!r} has no magnetic condition", {"segment": s.name})
            if s.velocity == VelocityCondition.natural_pressure and s.p_d is None:
                raise InconsistentBC(f"segment {s.name!r} is natural but has no p_d", {"segment": s.name})
            if MagneticCondition.tangential_prescribed in s.magnetic and s.b_d is None:
                raise InconsistentBC(f"segment {s.name!r} prescribes b x n but has no b_d", {"segment": s.name})

    def classify(self, mesh: PolyMesh) -> np.ndarray:
        """Segment index of every edge (-1 for interior edges)."""
        self.validate_segments()
        out = np.full(mesh.n_edges, -1, dtype=np.int64)
        for e in mesh.boundary_edges:
            mid = mesh.vertices[mesh.edges[e]].mean(axis=0)
            hits = [i for i, s in enumerate(self.segments) if s.selector(mid)]
            if len(hits) != 1:
                names = [self.segments[i].name for i in hits]
                raise InconsistentBC(
                    f"boundary edge {int(e)} at {mid.tolist()} matches {len(hits)} segments {names}",
                    {"edge": int(e), "segments": names},
                )
            out[e] = hits[0]
        return out


# --- common layouts ---


def homogeneous_bc() -> BCSpec:
    """No-slip velocity and b.n = 0 on the whole boundary."""
    return BCSpec(
        segments=[
            BoundarySegment(
                name="wall",
                selector=everywhere,
                velocity=VelocityCondition.dirichlet_zero,
                magnetic={MagneticCondition.normal_zero},
            )
        ]
    )


def _near(value: float, axis: int, tol: float) -> Selector:
    return lambda x: abs(float(x[axis]) - value) <= tol


def channel_bc(
    x0: float,
    x1: float,
    y0: float,
    y1: float,
    p_d: ScalarData,
    b_d: VectorData,
    tol: float = 1e-9,
) -> BCSpec:
    """Walls at y = y0, y1; open ends at x = x0, x1 driven by ``p_d``; tangential b everywhere."""
    tangential = {MagneticCondition.tangential_prescribed}
    wall = lambda x: _near(y0, 1, tol)(x) or _near(y1, 1, tol)(x)  # noqa: E731
    ends = lambda x: (_near(x0, 0, tol)(x) or _near(x1, 0, tol)(x)) and not wall(x)  # noqa: E731
    return BCSpec(
        segments=[
            BoundarySegment(
                name="walls",
                selector=wall,
                velocity=VelocityCondition.dirichlet_zero,
                magnetic=tangential,
                b_d=b_d,
            ),
            BoundarySegment(
                name="ends",
                selector=ends,
                velocity=VelocityCondition.natural_pressure,
                magnetic=tangential,
                p_d=p_d,
                b_d=b_d,
            ),
        ]
    )
