"""Scaled monomials m_a(x) = ((x - x_b) / h_E)^a on one element."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np

from vemmhd.mesh.polymesh import ElementGeometry


def dim_poly(k: int) -> int:
    """Dimension of P_k in two variables (0 for k < 0)."""
    return (k + 1) * (k + 2) // 2 if k >= 0 else 0


@lru_cache(maxsize=None)
def monomial_exponents(k: int) -> Tuple[Tuple[int, int], ...]:
    """Exponents ordered by total degree, then by decreasing power of x."""
    return tuple((d - j, j) for d in range(k + 1) for j in range(d + 1))


@lru_cache(maxsize=None)
def exponent_index(k: int) -> Dict[Tuple[int, int], int]:
    return {a: i for i, a in enumerate(monomial_exponents(k))}


@lru_cache(maxsize=None)
def diff_matrix(k: int, axis: int) -> np.ndarray:
    """
    Coefficients of d/d(xi_axis) m_a in P_{k-1}, shape (dim P_{k-1}, dim P_k).

    Scaled-coordinate derivative; divide by h_E for the physical one.
    """
    out = np.zeros((dim_poly(k - 1), dim_poly(k)))
    idx = exponent_index(k - 1) if k >= 1 else {}
    for j, a in enumerate(monomial_exponents(k)):
        if a[axis] == 0:
            continue
        b = (a[0] - 1, a[1]) if axis == 0 else (a[0], a[1] - 1)
        out[idx[b], j] = a[axis]
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def laplacian_matrix(k: int) -> np.ndarray:
    """Scaled Laplacian coefficients in P_{k-2}, shape (dim P_{k-2}, dim P_k)."""
    d0 = diff_matrix(k - 1, 0) @ diff_matrix(k, 0) if k >= 2 else np.zeros((0, dim_poly(k)))
    d1 = diff_matrix(k - 1, 1) @ diff_matrix(k, 1) if k >= 2 else np.zeros((0, dim_poly(k)))
    out = d0 + d1
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def embed_matrix(k_from: int, k_to: int) -> np.ndarray:
    """Injection of P_{k_from} coefficients into P_{k_to} (k_to >= k_from)."""
    out = np.zeros((dim_poly(k_to), dim_poly(k_from)))
    out[np.arange(dim_poly(k_from)), np.arange(dim_poly(k_from))] = 1.0
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class MonomialBasis:
    center: np.ndarray
    h: float
    k: int

    @property
    def exponents(self) -> Tuple[Tuple[int, int], ...]:
        return monomial_exponents(self.k)

    @property
    def dim(self) -> int:
        return dim_poly(self.k)

    @property
    def vector_dim(self) -> int:
        return 2 * self.dim

    def scaled(self, points: np.ndarray) -> np.ndarray:
        return (np.atleast_2d(points) - self.center) / self.h

    def values(self, points: np.ndarray) -> np.ndarray:
        """(npts, dim) values."""
        xi = self.scaled(points)
        ex = np.asarray(self.exponents)
        return xi[:, None, 0] ** ex[None, :, 0] * xi[:, None, 1] ** ex[None, :, 1]

    def gradients(self, points: np.ndarray) -> np.ndarray:
        """(npts, dim, 2) physical gradients."""
        if self.k == 0:
            return np.zeros((len(np.atleast_2d(points)), 1, 2))
        low = MonomialBasis(self.center, self.h, self.k - 1).values(points)
        gx = low @ diff_matrix(self.k, 0)
        gy = low @ diff_matrix(self.k, 1)
        return np.stack([gx, gy], axis=-1) / self.h

    def laplacians(self, points: np.ndarray) -> np.ndarray:
        if self.k < 2:
            return np.zeros((len(np.atleast_2d(points)), self.dim))
        low = MonomialBasis(self.center, self.h, self.k - 2).values(points)
        return low @ laplacian_matrix(self.k) / self.h**2

    # --- vector basis: index i < dim -> (m_i, 0), else (0, m_{i-dim}) ---

    def vector_values(self, points: np.ndarray) -> np.ndarray:
        """(npts, 2, 2*dim)."""
        v = self.values(points)
        z = np.zeros_like(v)
        return np.stack([np.hstack([v, z]), np.hstack([z, v])], axis=1)

    def vector_div(self, points: np.ndarray) -> np.ndarray:
        g = self.gradients(points)
        return np.hstack([g[:, :, 0], g[:, :, 1]])

    def vector_curl(self, points: np.ndarray) -> np.ndarray:
        """Scalar curl d1 v2 - d2 v1 of each vector member."""
        g = self.gradients(points)
        return np.hstack([-g[:, :, 1], g[:, :, 0]])

    def evaluate(self, coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Evaluate scalar (dim,) or vector (2*dim,) coefficient vectors."""
        coeffs = np.asarray(coeffs)
        v = self.values(points)
        if coeffs.shape[0] == self.dim:
            return v @ coeffs
        return np.stack([v @ coeffs[: self.dim], v @ coeffs[self.dim :]], axis=1)


def scaled_monomials(E: ElementGeometry, k: int) -> MonomialBasis:
    if k < 0:
        raise ValueError("monomial degree must be >= 0")
    return MonomialBasis(center=E.centroid, h=E.diameter, k=k)
