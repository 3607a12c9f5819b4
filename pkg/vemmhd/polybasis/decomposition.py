"""Split basis of [P_k]^2: gradients of P_{k+1} followed by x_E-perp times P_{k-1}."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np

from vemmhd.errors import SingularDecomposition
from vemmhd.mesh.polymesh import ElementGeometry
from vemmhd.polybasis.monomials import dim_poly, exponent_index, monomial_exponents

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e12


@dataclass(frozen=True)
class Pk2Decomposition:
    """
    ``Q[:, i]`` holds split basis member i in vector-monomial coordinates.

    Members are built in scaled coordinates (gradient = h_E * physical gradient),
    so the matrix only depends on k.
    """

    k: int
    Q: np.ndarray
    Q_inv: np.ndarray
    grad_exponents: Tuple[Tuple[int, int], ...]
    rot_exponents: Tuple[Tuple[int, int], ...]

    @property
    def n_grad(self) -> int:
        return len(self.grad_exponents)

    @property
    def n_rot(self) -> int:
        return len(self.rot_exponents)

    def to_split(self, coeffs: np.ndarray) -> np.ndarray:
        return self.Q_inv @ coeffs

    def from_split(self, split: np.ndarray) -> np.ndarray:
        return self.Q @ split


@lru_cache(maxsize=None)
def _build(k: int) -> Pk2Decomposition:
    n = dim_poly(k)
    idx = exponent_index(k)
    grad = tuple(a for a in monomial_exponents(k + 1) if sum(a) >= 1)
    rot = monomial_exponents(k - 1)
    cols = []
    for a in grad:
        col = np.zeros(2 * n)
        if a[0] > 0:
            col[idx[(a[0] - 1, a[1])]] = a[0]
        if a[1] > 0:
            col[n + idx[(a[0], a[1] - 1)]] = a[1]
        cols.append(col)
    for b in rot:
        col = np.zeros(2 * n)
        col[idx[(b[0], b[1] + 1)]] = -1.0
        col[n + idx[(b[0] + 1, b[1])]] = 1.0
        cols.append(col)
    Q = np.column_stack(cols)
    cond = float(np.linalg.cond(Q))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularDecomposition(
            f"[P_{k}]^2 split basis is singular (condition {cond:.3e})", {"k": k, "condition": cond}
        )
    Q_inv = np.linalg.inv(Q)
    Q.setflags(write=False)
    Q_inv.setflags(write=False)
    logger.debug(f"built [P_{k}]^2 decomposition: {len(grad)} gradient + {len(rot)} rotational")
    return Pk2Decomposition(k=k, Q=Q, Q_inv=Q_inv, grad_exponents=grad, rot_exponents=rot)


def decompose_Pk2(E: ElementGeometry, k: int) -> Pk2Decomposition:
    """The split basis lives in scaled coordinates, so every element shares one matrix per k."""
    if k < 1:
        raise ValueError("decomposition needs k >= 1")
    return _build(k)
