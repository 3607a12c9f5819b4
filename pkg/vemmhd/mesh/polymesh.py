"""Polygonal mesh topology and per-element geometry."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Sequence, Tuple

import numpy as np

from vemmhd.errors import DegenerateCell, MeshFormatError, NonManifoldEdge, SelfIntersectingCell

logger = logging.getLogger(__name__)

_AREA_EPS = 1e-14


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def signed_area(points: np.ndarray) -> float:
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c) -> float:
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


def _check_simple(cell_id: int, points: np.ndarray) -> None:
    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_cross(points[i], points[(i + 1) % n], points[j], points[(j + 1) % n]):
                raise SelfIntersectingCell(
                    f"cell {cell_id} has crossing edges {i} and {j}", {"cell": cell_id}
                )


@dataclass(frozen=True)
class ElementGeometry:
    """
    Geometry of one polygon. Local edge ``l`` runs from local vertex ``l`` to ``l+1``
    (counter-clockwise); ``flipped[l]`` is True when that direction is opposite to the
    global edge direction (lower vertex index first).
    """

    index: int
    vertices: np.ndarray
    area: float
    centroid: np.ndarray
    diameter: float
    edge_lengths: np.ndarray
    normals: np.ndarray
    tangents: np.ndarray
    midpoints: np.ndarray
    global_edges: np.ndarray
    flipped: np.ndarray

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edge_lengths)

    def edge_endpoints(self, l: int) -> Tuple[np.ndarray, np.ndarray]:
        """Endpoints of local edge ``l`` in global orientation (s = -1, s = +1)."""
        a = self.vertices[l]
        b = self.vertices[(l + 1) % self.n_vertices]
        return (b, a) if self.flipped[l] else (a, b)

    def edge_vertex_locals(self, l: int) -> Tuple[int, int]:
        """Local vertex indices at s = -1 and s = +1 of local edge ``l``."""
        a, b = l, (l + 1) % self.n_vertices
        return (b, a) if self.flipped[l] else (a, b)


@dataclass(frozen=True)
class PolyMesh:
    vertices: np.ndarray
    cells: Tuple[np.ndarray, ...]
    edges: np.ndarray
    edge_cells: np.ndarray
    boundary: np.ndarray
    cell_edges: Tuple[np.ndarray, ...]

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @cached_property
    def geometry(self) -> Tuple[ElementGeometry, ...]:
        return tuple(_element_geometry(self, c) for c in range(self.n_cells))

    @cached_property
    def boundary_edges(self) -> np.ndarray:
        return _frozen(np.flatnonzero(self.boundary))

    def total_area(self) -> float:
        return float(sum(g.area for g in self.geometry))

    def cells_containing(self, point: Sequence[float], tol: float = 1e-12) -> List[int]:
        """Cells whose closure contains ``point`` (convex cells assumed)."""
        p = np.asarray(point, dtype=float)
        hits: List[int] = []
        for g in self.geometry:
            if np.any(p < g.vertices.min(axis=0) - tol) or np.any(p > g.vertices.max(axis=0) + tol):
                continue
            d = np.einsum("ij,ij->i", p - g.midpoints, g.normals)
            if np.all(d <= tol * g.diameter):
                hits.append(g.index)
        return hits


def _element_geometry(mesh: PolyMesh, c: int) -> ElementGeometry:
    loop = mesh.cells[c]
    pts = mesh.vertices[loop]
    nxt = np.roll(pts, -1, axis=0)
    d = nxt - pts
    lengths = np.hypot(d[:, 0], d[:, 1])
    tangents = d / lengths[:, None]
    normals = np.column_stack([tangents[:, 1], -tangents[:, 0]])

    area = signed_area(pts)
    cross = pts[:, 0] * nxt[:, 1] - nxt[:, 0] * pts[:, 1]
    centroid = np.array(
        [np.sum((pts[:, 0] + nxt[:, 0]) * cross), np.sum((pts[:, 1] + nxt[:, 1]) * cross)]
    ) / (6.0 * area)
    diff = pts[:, None, :] - pts[None, :, :]
    diameter = float(np.sqrt((diff**2).sum(axis=-1)).max())
    flipped = loop > np.roll(loop, -1)

    return ElementGeometry(
        index=c,
        vertices=_frozen(pts.copy()),
        area=float(area),
        centroid=_frozen(centroid),
        diameter=diameter,
        edge_lengths=_frozen(lengths),
        normals=_frozen(normals),
        tangents=_frozen(tangents),
        midpoints=_frozen(0.5 * (pts + nxt)),
        global_edges=mesh.cell_edges[c],
        flipped=_frozen(flipped),
    )


def build_mesh(vertices: Sequence[Sequence[float]], cells: Sequence[Sequence[int]]) -> PolyMesh:
    """
    Validate a polygon soup and derive edges.

    Args:
        vertices: (x, y) points.
        cells: vertex-index loops; clockwise loops are re-oriented.

    Returns:
        Immutable PolyMesh with edges keyed by (min, max) vertex pair in first-seen order.
    """
    verts = np.asarray(vertices, dtype=float)
    if verts.ndim != 2 or verts.shape[1] != 2:
        raise MeshFormatError("vertices must be a list of [x, y] pairs")
    nv = len(verts)

    loops: List[np.ndarray] = []
    for c, raw in enumerate(cells):
        loop = np.asarray(raw, dtype=np.int64)
        if loop.ndim != 1 or len(loop) < 3:
            raise DegenerateCell(f"cell {c} needs at least 3 vertices", {"cell": c})
        if loop.min() < 0 or loop.max() >= nv:
            raise MeshFormatError(f"cell {c} references a vertex out of range", {"cell": c})
        if len(set(loop.tolist())) != len(loop):
            raise DegenerateCell(f"cell {c} repeats a vertex", {"cell": c})
        pts = verts[loop]
        area = signed_area(pts)
        scale = float(np.ptp(pts, axis=0).max()) ** 2
        if abs(area) <= _AREA_EPS * max(scale, 1.0) or scale == 0.0:
            raise DegenerateCell(f"cell {c} has zero area", {"cell": c})
        if area < 0:
            loop = loop[::-1].copy()
            pts = verts[loop]
        _check_simple(c, pts)
        loops.append(_frozen(loop))

    edge_index: Dict[Tuple[int, int], int] = {}
    edge_list: List[Tuple[int, int]] = []
    incident: List[List[Tuple[int, bool]]] = []
    cell_edges: List[np.ndarray] = []
    for c, loop in enumerate(loops):
        ids = np.empty(len(loop), dtype=np.int64)
        for l in range(len(loop)):
            a, b = int(loop[l]), int(loop[(l + 1) % len(loop)])
            key = (min(a, b), max(a, b))
            e = edge_index.get(key)
            if e is None:
                e = len(edge_list)
                edge_index[key] = e
                edge_list.append(key)
                incident.append([])
            incident[e].append((c, a < b))
            ids[l] = e
        cell_edges.append(_frozen(ids))

    edge_cells = np.full((len(edge_list), 2), -1, dtype=np.int64)
    for e, inc in enumerate(incident):
        if len(inc) > 2:
            raise NonManifoldEdge(
                f"edge {edge_list[e]} is shared by {len(inc)} cells", {"edge": list(edge_list[e])}
            )
        if len(inc) == 2 and inc[0][1] == inc[1][1]:
            raise NonManifoldEdge(
                f"edge {edge_list[e]} is traversed in the same direction by cells "
                f"{inc[0][0]} and {inc[1][0]}",
                {"edge": list(edge_list[e])},
            )
        for slot, (c, _) in enumerate(inc):
            edge_cells[e, slot] = c

    mesh = PolyMesh(
        vertices=_frozen(verts.copy()),
        cells=tuple(loops),
        edges=_frozen(np.asarray(edge_list, dtype=np.int64).reshape(-1, 2)),
        edge_cells=_frozen(edge_cells),
        boundary=_frozen(edge_cells[:, 1] < 0),
        cell_edges=tuple(cell_edges),
    )
    logger.debug(f"built mesh: {mesh.n_cells} cells, {mesh.n_edges} edges, {nv} vertices")
    return mesh


def mesh_size(mesh: PolyMesh) -> float:
    return max(g.diameter for g in mesh.geometry)
