"""Mesh families used by the convergence studies."""
from __future__ import annotations

import logging
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.spatial import Voronoi, cKDTree

from vemmhd.errors import ConfigError
from vemmhd.mesh.polymesh import PolyMesh, build_mesh, mesh_size

logger = logging.getLogger(__name__)

Domain = Tuple[float, float, float, float]
UNIT_SQUARE: Domain = (0.0, 1.0, 0.0, 1.0)

LLOYD_MAX_ITER = 200


def _grid_vertices(nx: int, ny: int, domain: Domain) -> np.ndarray:
    x0, x1, y0, y1 = domain
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    return np.column_stack([X.ravel(), Y.ravel()])


def _vid(i: int, j: int, nx: int) -> int:
    return j * (nx + 1) + i


def quad_mesh(nx: int, ny: Optional[int] = None, domain: Domain = UNIT_SQUARE) -> PolyMesh:
    ny = nx if ny is None else ny
    cells = [
        [_vid(i, j, nx), _vid(i + 1, j, nx), _vid(i + 1, j + 1, nx), _vid(i, j + 1, nx)]
        for j in range(ny)
        for i in range(nx)
    ]
    return build_mesh(_grid_vertices(nx, ny, domain), cells)


def tri_mesh(nx: int, ny: Optional[int] = None, domain: Domain = UNIT_SQUARE) -> PolyMesh:
    ny = nx if ny is None else ny
    cells: List[List[int]] = []
    for j in range(ny):
        for i in range(nx):
            a, b = _vid(i, j, nx), _vid(i + 1, j, nx)
            c, d = _vid(i + 1, j + 1, nx), _vid(i, j + 1, nx)
            cells.append([a, b, c])
            cells.append([a, c, d])
    return build_mesh(_grid_vertices(nx, ny, domain), cells)


def perturbed_quad_mesh(
    nx: int,
    ny: Optional[int] = None,
    domain: Domain = UNIT_SQUARE,
    seed: int = 0,
    amplitude: float = 0.15,
) -> PolyMesh:
    """Quad grid with interior vertices moved by up to ``amplitude`` cell widths."""
    ny = nx if ny is None else ny
    x0, x1, y0, y1 = domain
    hx, hy = (x1 - x0) / nx, (y1 - y0) / ny
    verts = _grid_vertices(nx, ny, domain)
    rng = np.random.default_rng(seed)
    shift = rng.uniform(-amplitude, amplitude, size=verts.shape) * np.array([hx, hy])
    interior = (
        (verts[:, 0] > x0 + 0.5 * hx)
        & (verts[:, 0] < x1 - 0.5 * hx)
        & (verts[:, 1] > y0 + 0.5 * hy)
        & (verts[:, 1] < y1 - 0.5 * hy)
    )
    verts[interior] += shift[interior]
    cells = [
        [_vid(i, j, nx), _vid(i + 1, j, nx), _vid(i + 1, j + 1, nx), _vid(i, j + 1, nx)]
        for j in range(ny)
        for i in range(nx)
    ]
    return build_mesh(verts, cells)


def _reflect(seeds: np.ndarray, domain: Domain) -> np.ndarray:
    x0, x1, y0, y1 = domain
    left = seeds * [-1, 1] + [2 * x0, 0]
    right = seeds * [-1, 1] + [2 * x1, 0]
    down = seeds * [1, -1] + [0, 2 * y0]
    up = seeds * [1, -1] + [0, 2 * y1]
    return np.vstack([seeds, left, right, down, up])


def _bounded_voronoi(seeds: np.ndarray, domain: Domain) -> Tuple[np.ndarray, List[List[int]]]:
    vor = Voronoi(_reflect(seeds, domain))
    regions = []
    for s in range(len(seeds)):
        region = vor.regions[vor.point_region[s]]
        if -1 in region or not region:
            raise ConfigError("voronoi generator produced an unbounded cell")
        regions.append(list(region))
    return vor.vertices, regions


def _cell_centroid(pts: np.ndarray) -> np.ndarray:
    nxt = np.roll(pts, -1, axis=0)
    cross = pts[:, 0] * nxt[:, 1] - nxt[:, 0] * pts[:, 1]
    area = 0.5 * cross.sum()
    return np.array([((pts[:, 0] + nxt[:, 0]) * cross).sum(), ((pts[:, 1] + nxt[:, 1]) * cross).sum()]) / (
        6.0 * area
    )


def _ccw_around(points: np.ndarray, region: List[int], center: np.ndarray) -> List[int]:
    ang = np.arctan2(points[region, 1] - center[1], points[region, 0] - center[0])
    return [region[i] for i in np.argsort(ang)]


def voronoi_mesh(
    n: int,
    domain: Domain = UNIT_SQUARE,
    seed: int = 0,
    max_lloyd: int = LLOYD_MAX_ITER,
) -> PolyMesh:
    """
    Centroidal Voronoi mesh with n*n cells, bounded by mirroring seeds across the box.

    Lloyd iterations run until the largest seed movement drops below 1e-10 times the seed
    spacing. The seed spacing is only a tolerance scale; the mesh size is the largest cell diameter.
    """
    x0, x1, y0, y1 = domain
    spacing = max(x1 - x0, y1 - y0) / n
    rng = np.random.default_rng(seed)
    seeds = np.column_stack([rng.uniform(x0, x1, n * n), rng.uniform(y0, y1, n * n)])

    moved = np.inf
    it = 0
    for it in range(1, max_lloyd + 1):
        verts, regions = _bounded_voronoi(seeds, domain)
        cents = np.array(
            [_cell_centroid(verts[_ccw_around(verts, r, seeds[s])]) for s, r in enumerate(regions)]
        )
        moved = float(np.abs(cents - seeds).max())
        seeds = cents
        if moved < 1e-10 * spacing:
            break
    else:
        logger.warning(f"Lloyd iteration stopped after {max_lloyd} steps (movement {moved:.3e}, spacing {spacing:.3e})")
    logger.debug(f"voronoi: {it} Lloyd steps, final movement {moved:.3e}")

    verts, regions = _bounded_voronoi(seeds, domain)
    mesh = _voronoi_to_mesh(verts, regions, seeds, domain, spacing)
    logger.info(f"voronoi: {mesh.n_cells} cells, h {mesh_size(mesh):.4f}")
    return mesh


def _voronoi_to_mesh(
    verts: np.ndarray, regions: List[List[int]], seeds: np.ndarray, domain: Domain, spacing: float
) -> PolyMesh:
    x0, x1, y0, y1 = domain
    snap = 1e-9 * spacing
    verts = verts.copy()
    for col, lo, hi in ((0, x0, x1), (1, y0, y1)):
        verts[np.abs(verts[:, col] - lo) < snap, col] = lo
        verts[np.abs(verts[:, col] - hi) < snap, col] = hi

    used = sorted({v for r in regions for v in r})
    remap: Dict[int, int] = {}
    parent = list(range(len(used)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    pos = {v: i for i, v in enumerate(used)}
    for a, b in cKDTree(verts[used]).query_pairs(r=snap):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = sorted({find(i) for i in range(len(used))})
    new_id = {r: i for i, r in enumerate(roots)}
    for v in used:
        remap[v] = new_id[find(pos[v])]
    out_verts = np.array([verts[used[r]] for r in roots])

    cells: List[List[int]] = []
    for s, region in enumerate(regions):
        loop = [remap[v] for v in _ccw_around(verts, region, seeds[s])]
        dedup = [v for i, v in enumerate(loop) if v != loop[i - 1]]
        cells.append(dedup)
    return build_mesh(out_verts, cells)


_FAMILIES: Dict[str, Callable[..., PolyMesh]] = {
    "quad": lambda n, seed, domain, ny: quad_mesh(n, ny, domain),
    "tri": lambda n, seed, domain, ny: tri_mesh(n, ny, domain),
    "perturbed_quad": lambda n, seed, domain, ny: perturbed_quad_mesh(n, ny, domain, seed=seed),
    "voronoi": lambda n, seed, domain, ny: voronoi_mesh(n, domain, seed=seed),
}


def gen_family(
    name: str,
    n: int,
    seed: int = 0,
    domain: Domain = UNIT_SQUARE,
    ny: Optional[int] = None,
) -> PolyMesh:
    if name not in _FAMILIES:
        raise ConfigError(f"unknown mesh family {name!r}; expected one of {sorted(_FAMILIES)}")
    if n < 1:
        raise ConfigError("mesh subdivision n must be >= 1")
    mesh = _FAMILIES[name](n, seed, domain, ny)
    logger.info(f"generated {name} mesh n={n}: {mesh.n_cells} cells")
    return mesh
