"""Small dense solves for element-local projection systems."""
from __future__ import annotations

import logging
from typing import Type

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from vemmhd.errors import NumericalError, SingularMass

logger = logging.getLogger(__name__)

WARN_CONDITION = 1e10
FAIL_CONDITION = 1e14


def local_solve(
    matrix: np.ndarray,
    rhs: np.ndarray,
    *,
    error: Type[NumericalError] = SingularMass,
    label: str = "local",
) -> np.ndarray:
    """LU with partial pivoting; warns above 1e10 and raises ``error`` above 1e14."""
    cond = float(np.linalg.cond(matrix)) if matrix.size else 1.0
    if not np.isfinite(cond) or cond > FAIL_CONDITION:
        raise error(f"{label} matrix is singular (condition {cond:.3e})", {"condition": cond})
    if cond > WARN_CONDITION:
        logger.warning(f"{label} matrix is ill-conditioned (condition {cond:.3e})")
    return lu_solve(lu_factor(matrix), rhs)
