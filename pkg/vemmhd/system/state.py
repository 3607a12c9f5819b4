from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from vemmhd.system.dofmap import DofMap


@dataclass
class SolverState:
    u: np.ndarray
    b: np.ndarray
    p: np.ndarray
    multiplier: float = 0.0
    iterations: int = 0
    increment: float = float("inf")
    history: List[float] = field(default_factory=list)
    converged: bool = False

    @classmethod
    def zeros(cls, dofmap: DofMap) -> "SolverState":
        return cls(u=np.zeros(dofmap.n_vel), b=np.zeros(dofmap.n_mag), p=np.zeros(dofmap.n_p))

    @classmethod
    def from_full(cls, dofmap: DofMap, x: np.ndarray) -> "SolverState":
        u, b, p, lam = dofmap.split(x)
        return cls(u=u.copy(), b=b.copy(), p=p.copy(), multiplier=lam)
