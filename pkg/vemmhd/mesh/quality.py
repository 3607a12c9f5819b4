"""Shape-regularity diagnostics. Low ratios are logged, never raised."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from vemmhd.mesh.polymesh import ElementGeometry, PolyMesh

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.05
_RATIO_FLOOR = float(np.finfo(float).eps)


@dataclass(frozen=True)
class QualityReport:
    inradius_ratio: np.ndarray
    vertex_distance_ratio: np.ndarray
    threshold: float

    @property
    def min_inradius_ratio(self) -> float:
        return float(self.inradius_ratio.min())

    @property
    def min_vertex_distance_ratio(self) -> float:
        return float(self.vertex_distance_ratio.min())

    @property
    def flagged(self) -> np.ndarray:
        bad = (self.inradius_ratio < self.threshold) | (self.vertex_distance_ratio < self.threshold)
        return np.flatnonzero(bad)


def _inradius_ratio(g: ElementGeometry) -> float:
    # distance from the centroid to the closest edge line; negative for some nonconvex cells
    d = np.einsum("ij,ij->i", g.midpoints - g.centroid, g.normals)
    return float(np.clip(d.min() / g.diameter, _RATIO_FLOOR, 1.0))


def _vertex_distance_ratio(g: ElementGeometry) -> float:
    diff = g.vertices[:, None, :] - g.vertices[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    dist[np.diag_indices_from(dist)] = np.inf
    return float(dist.min() / g.diameter)


def quality_report(mesh: PolyMesh, threshold: Optional[float] = None) -> QualityReport:
    threshold = DEFAULT_THRESHOLD if threshold is None else threshold
    rin = np.array([_inradius_ratio(g) for g in mesh.geometry])
    rvd = np.array([_vertex_distance_ratio(g) for g in mesh.geometry])
    report = QualityReport(inradius_ratio=rin, vertex_distance_ratio=rvd, threshold=threshold)
    flagged = report.flagged
    if len(flagged):
        logger.warning(
            f"{len(flagged)} cell(s) below quality threshold {threshold}: "
            f"min inradius ratio {report.min_inradius_ratio:.4f}, "
            f"min vertex distance ratio {report.min_vertex_distance_ratio:.4f}"
        )
    return report
