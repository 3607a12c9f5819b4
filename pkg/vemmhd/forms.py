"""
Element matrices of the discrete MHD forms.

Rows index test functions and columns index trial functions throughout.
Stabilizers are the plain Euclidean product of DOF vectors of (I - Pnabla) remainders.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from vemmhd.mesh.polymesh import ElementGeometry
from vemmhd.polybasis.l2 import l2_project_analytic
from vemmhd.polybasis.monomials import scaled_monomials
from vemmhd.polybasis.quadrature import polygon_quadrature
from vemmhd.spaces.magnetic import MagneticProjections
from vemmhd.spaces.velocity import VelocityProjections

logger = logging.getLogger(__name__)

Field2D = Callable[[np.ndarray], np.ndarray]


class ModelParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    r_nu: float = Field(default=1.0, gt=0, description="Hydrodynamic Reynolds number R_nu")
    r_m: float = Field(default=1.0, gt=0, description="Magnetic Reynolds number R_m")
    s_c: float = Field(default=1.0, gt=0, description="Coupling coefficient S_c")

    @property
    def hartmann(self) -> float:
        return float(np.sqrt(self.r_nu * self.r_m * self.s_c))


def _remainder(proj) -> np.ndarray:
    """(I - D Pnabla): DOFs of v minus DOFs of its Pnabla projection."""
    return np.eye(proj.n_dofs) - proj.dof_of_poly @ proj.pnabla


def local_a0(proj: VelocityProjections, params: ModelParams) -> np.ndarray:
    P = proj.pnabla
    R = _remainder(proj)
    return (P.T @ proj.stiffness @ P + R.T @ R) / params.r_nu


def local_a1(proj: MagneticProjections, params: ModelParams) -> np.ndarray:
    M = proj.mass_km1
    R = _remainder(proj)
    consistent = proj.curl_rep.T @ M @ proj.curl_rep + proj.div_rep.T @ M @ proj.div_rep
    return params.s_c / params.r_m * (consistent + R.T @ R)


def local_c2(proj: VelocityProjections, u_prev: np.ndarray) -> np.ndarray:
    """
    Skew convection ``1/2 [((Pgrad w) u, v) - ((Pgrad v) u, w)]`` with u = Pi0 u_prev.
    """
    w = proj.tri_rule.weights
    U = np.einsum("qjd,d->qj", proj.p0_values, u_prev)
    T = np.einsum("q,qijw,qj,qiv->vw", w, proj.pgrad_values, U, proj.p0_values, optimize=True)
    return 0.5 * (T - T.T)


def local_c3(
    vel: VelocityProjections,
    mag: MagneticProjections,
    b_prev: np.ndarray,
    params: ModelParams,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Lorentz and induction couplings around the frozen field b = Pi0 b_prev.

    C3a[v, c] = -S_c (curl c x b, v) and C3b = -C3a^T, where s x w = (-w2 s, w1 s).
    """
    w = vel.tri_rule.weights
    B = np.einsum("qjd,d->qj", mag.p0_values, b_prev)
    cross = -B[:, 1, None] * vel.p0_values[:, 0, :] + B[:, 0, None] * vel.p0_values[:, 1, :]
    C3a = -params.s_c * np.einsum("q,qc,qv->vc", w, mag.curl_values, cross)
    return C3a, -C3a.T


def local_d(proj: VelocityProjections) -> np.ndarray:
    """D[q, v] = integral of (div v) m_q."""
    return proj.mass_km1 @ proj.div_rep


def local_rhs(
    vel: VelocityProjections,
    mag: MagneticProjections,
    f: Field2D,
    g: Field2D,
) -> Tuple[np.ndarray, np.ndarray]:
    E = vel.geometry
    cf = l2_project_analytic(f, E, vel.k)
    cg = l2_project_analytic(g, E, mag.k)
    return (vel.mass @ cf) @ vel.p0, (mag.mass @ cg) @ mag.p0


# --- exact forms on polynomials ---


@dataclass(frozen=True)
class ExactForms:
    """Continuous forms evaluated by quadrature on vector polynomials given in scaled monomials."""

    geometry: ElementGeometry
    k: int
    params: ModelParams

    def _setup(self):
        basis = scaled_monomials(self.geometry, self.k)
        rule = polygon_quadrature(self.geometry, 3 * self.k + 2)
        return basis, rule, basis.values(rule.points), basis.gradients(rule.points)

    @staticmethod
    def _split(p: np.ndarray, n: int) -> np.ndarray:
        return np.asarray(p).reshape(2, n)

    def _eval(self, p: np.ndarray):
        basis, rule, V, G = self._setup()
        c = self._split(p, basis.dim)
        vals = V @ c.T  # (nq, 2)
        grads = np.einsum("qad,ia->qid", G, c)  # [q, i, j] = d_j p_i
        return rule.weights, vals, grads

    def a0(self, p: np.ndarray, q: np.ndarray) -> float:
        w, _, gp = self._eval(p)
        _, _, gq = self._eval(q)
        return float(np.einsum("q,qij,qij->", w, gp, gq) / self.params.r_nu)

    def a1(self, p: np.ndarray, q: np.ndarray) -> float:
        w, _, gp = self._eval(p)
        _, _, gq = self._eval(q)
        curl_p = gp[:, 1, 0] - gp[:, 0, 1]
        curl_q = gq[:, 1, 0] - gq[:, 0, 1]
        div_p = gp[:, 0, 0] + gp[:, 1, 1]
        div_q = gq[:, 0, 0] + gq[:, 1, 1]
        return float(self.params.s_c / self.params.r_m * np.sum(w * (curl_p * curl_q + div_p * div_q)))

    def a2(self, u: np.ndarray, w_: np.ndarray, v: np.ndarray) -> float:
        """((grad w) u, v)."""
        wts, uv, _ = self._eval(u)
        _, _, gw = self._eval(w_)
        _, vv, _ = self._eval(v)
        return float(np.einsum("q,qij,qj,qi->", wts, gw, uv, vv))

    def a3(self, psi: np.ndarray, b: np.ndarray, v: np.ndarray) -> float:
        """S_c (curl psi x b, v)."""
        wts, _, gpsi = self._eval(psi)
        _, bv, _ = self._eval(b)
        _, vv, _ = self._eval(v)
        s = gpsi[:, 1, 0] - gpsi[:, 0, 1]
        cross = np.column_stack([-bv[:, 1] * s, bv[:, 0] * s])
        return float(self.params.s_c * np.einsum("q,qi,qi->", wts, cross, vv))

    def d(self, v: np.ndarray, q: np.ndarray) -> float:
        """(div v, q) for a scalar polynomial q of degree <= k-1."""
        basis, rule, V, _ = self._setup()
        wts, _, gv = self._eval(v)
        qv = V[:, : len(q)] @ np.asarray(q)
        return float(np.sum(wts * (gv[:, 0, 0] + gv[:, 1, 1]) * qv))


def exact_forms_eval(E: ElementGeometry, k: int, params: ModelParams, form: str, *args: np.ndarray) -> float:
    """Evaluate one of ``a0, a1, a2, a3, d`` on polynomial coefficient vectors."""
    forms = ExactForms(geometry=E, k=k, params=params)
    if form not in ("a0", "a1", "a2", "a3", "d"):
        raise ValueError(f"unknown form {form!r}")
    return getattr(forms, form)(*args)
