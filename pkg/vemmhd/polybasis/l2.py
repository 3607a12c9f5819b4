from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from vemmhd.errors import SingularMass
from vemmhd.mesh.polymesh import ElementGeometry
from vemmhd.polybasis.dense import local_solve
from vemmhd.polybasis.monomials import MonomialBasis, scaled_monomials
from vemmhd.polybasis.quadrature import QuadRule, polygon_quadrature


def mass_matrix(basis: MonomialBasis, rule: QuadRule) -> np.ndarray:
    v = basis.values(rule.points)
    return (v * rule.weights[:, None]).T @ v


def stiffness_matrix(basis: MonomialBasis, rule: QuadRule) -> np.ndarray:
    g = basis.gradients(rule.points)
    return np.einsum("q,qad,qbd->ab", rule.weights, g, g)


def l2_project_analytic(
    f: Callable[[np.ndarray], np.ndarray],
    E: ElementGeometry,
    k: int,
    order: Optional[int] = None,
) -> np.ndarray:
    """
    Coefficients of the L2 projection of ``f`` onto P_k(E) (or [P_k(E)]^2).

    ``f`` maps (npts, 2) points to (npts,) scalars or (npts, 2) vectors; vector
    results are returned component-major.
    """
    basis = scaled_monomials(E, k)
    rule = polygon_quadrature(E, order if order is not None else 2 * k + 2)
    v = basis.values(rule.points)
    M = (v * rule.weights[:, None]).T @ v
    fv = np.asarray(f(rule.points), dtype=float)
    moments = (v * rule.weights[:, None]).T @ fv
    coeffs = local_solve(M, moments, error=SingularMass, label=f"P_{k} mass (cell {E.index})")
    if coeffs.ndim == 2:
        return np.concatenate([coeffs[:, 0], coeffs[:, 1]])
    return coeffs
