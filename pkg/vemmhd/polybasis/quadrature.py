"""Gauss rules on segments, triangles (collapsed Gauss-Jacobi) and fan-triangulated polygons."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

from vemmhd.mesh.polymesh import ElementGeometry


@dataclass(frozen=True)
class QuadRule:
    points: np.ndarray
    weights: np.ndarray
    degree: int
    # edge rules also carry the Legendre coordinate s in [-1, 1] of each point
    params: Optional[np.ndarray] = None

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Sum over the leading (point) axis."""
        return np.tensordot(self.weights, values, axes=(0, 0))


def _n_points(order: int) -> int:
    return max(1, (order + 2) // 2)


@lru_cache(maxsize=None)
def _reference_triangle(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Rule on (0,0), (1,0), (0,1): x = u, y = (1 - u) v, with weight (1 - u) absorbed by Jacobi."""
    n = _n_points(order)
    tu, wu = roots_jacobi(n, 1.0, 0.0)
    tv, wv = leggauss(n)
    u = 0.5 * (tu + 1.0)
    v = 0.5 * (tv + 1.0)
    wu = wu / 4.0
    wv = wv / 2.0
    U, V = np.meshgrid(u, v, indexing="ij")
    W = np.outer(wu, wv)
    pts = np.column_stack([U.ravel(), ((1.0 - U) * V).ravel()])
    pts.setflags(write=False)
    w = W.ravel()
    w.setflags(write=False)
    return pts, w


def triangle_quadrature(a: np.ndarray, b: np.ndarray, c: np.ndarray, order: int) -> QuadRule:
    ref, w = _reference_triangle(order)
    jac = np.column_stack([b - a, c - a])
    det = abs(float(np.linalg.det(jac)))
    pts = a + ref @ jac.T
    return QuadRule(points=pts, weights=w * det, degree=order)


def polygon_quadrature(E: ElementGeometry, order: int) -> QuadRule:
    """Fan triangulation from the centroid; exact to ``order`` on star-shaped cells."""
    if order < 0:
        raise ValueError("quadrature order must be >= 0")
    ref, w = _reference_triangle(order)
    verts = E.vertices
    nxt = np.roll(verts, -1, axis=0)
    pts, wts = [], []
    for p, q in zip(verts, nxt):
        jac = np.column_stack([p - E.centroid, q - E.centroid])
        pts.append(E.centroid + ref @ jac.T)
        wts.append(w * abs(float(np.linalg.det(jac))))
    return QuadRule(points=np.vstack(pts), weights=np.concatenate(wts), degree=order)


def edge_quadrature(a: np.ndarray, b: np.ndarray, order: int) -> QuadRule:
    """Gauss-Legendre on the segment a -> b; ``params`` runs from -1 at a to +1 at b."""
    if order < 0:
        raise ValueError("quadrature order must be >= 0")
    s, w = leggauss(_n_points(order))
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    length = float(np.hypot(*(b - a)))
    pts = a + np.outer(0.5 * (s + 1.0), b - a)
    return QuadRule(points=pts, weights=0.5 * length * w, degree=order, params=s)
