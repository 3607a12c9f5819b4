"""
Closed-form test fields built from separable terms c * f(x) * g(y), so values,
gradients and Hessians are exact and the forcing follows from the strong equations.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Tuple

import numpy as np

from vemmhd.forms import ModelParams
from vemmhd.system.bc import BCSpec, channel_bc, homogeneous_bc

logger = logging.getLogger(__name__)

Fn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Fn1D:
    """A 1D function with its first two derivatives."""

    f: Fn
    d1: Fn
    d2: Fn


def const1d(c: float = 1.0) -> Fn1D:
    return Fn1D(lambda t: np.full_like(t, c, dtype=float), np.zeros_like, np.zeros_like)


def linear1d(a: float = 1.0) -> Fn1D:
    return Fn1D(lambda t: a * t, lambda t: np.full_like(t, a, dtype=float), np.zeros_like)


def sin1d(w: float) -> Fn1D:
    return Fn1D(lambda t: np.sin(w * t), lambda t: w * np.cos(w * t), lambda t: -(w**2) * np.sin(w * t))


def cos1d(w: float) -> Fn1D:
    return Fn1D(lambda t: np.cos(w * t), lambda t: -w * np.sin(w * t), lambda t: -(w**2) * np.cos(w * t))


def product1d(a: Fn1D, b: Fn1D) -> Fn1D:
    return Fn1D(
        lambda t: a.f(t) * b.f(t),
        lambda t: a.d1(t) * b.f(t) + a.f(t) * b.d1(t),
        lambda t: a.d2(t) * b.f(t) + 2 * a.d1(t) * b.d1(t) + a.f(t) * b.d2(t),
    )


def scaled1d(c: float, a: Fn1D) -> Fn1D:
    return Fn1D(lambda t: c * a.f(t), lambda t: c * a.d1(t), lambda t: c * a.d2(t))


def sum1d(a: Fn1D, b: Fn1D) -> Fn1D:
    return Fn1D(lambda t: a.f(t) + b.f(t), lambda t: a.d1(t) + b.d1(t), lambda t: a.d2(t) + b.d2(t))


@dataclass(frozen=True)
class Term:
    coef: float
    fx: Fn1D
    fy: Fn1D


@dataclass(frozen=True)
class ScalarField:
    terms: Tuple[Term, ...] = ()

    def value(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        out = np.zeros(len(x))
        for t in self.terms:
            out += t.coef * t.fx.f(x[:, 0]) * t.fy.f(x[:, 1])
        return out

    def grad(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        out = np.zeros((len(x), 2))
        for t in self.terms:
            X, Y = x[:, 0], x[:, 1]
            out[:, 0] += t.coef * t.fx.d1(X) * t.fy.f(Y)
            out[:, 1] += t.coef * t.fx.f(X) * t.fy.d1(Y)
        return out

    def hess(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        out = np.zeros((len(x), 2, 2))
        for t in self.terms:
            X, Y = x[:, 0], x[:, 1]
            out[:, 0, 0] += t.coef * t.fx.d2(X) * t.fy.f(Y)
            out[:, 1, 1] += t.coef * t.fx.f(X) * t.fy.d2(Y)
            mixed = t.coef * t.fx.d1(X) * t.fy.d1(Y)
            out[:, 0, 1] += mixed
            out[:, 1, 0] += mixed
        return out

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.value(x)


@dataclass(frozen=True)
class VectorField:
    c1: ScalarField
    c2: ScalarField

    def value(self, x: np.ndarray) -> np.ndarray:
        return np.column_stack([self.c1.value(x), self.c2.value(x)])

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        """[n, i, j] = d_j v_i."""
        return np.stack([self.c1.grad(x), self.c2.grad(x)], axis=1)

    def hessians(self, x: np.ndarray) -> np.ndarray:
        """[n, i, a, b] = d_a d_b v_i."""
        return np.stack([self.c1.hess(x), self.c2.hess(x)], axis=1)

    def div(self, x: np.ndarray) -> np.ndarray:
        J = self.jacobian(x)
        return J[:, 0, 0] + J[:, 1, 1]

    def curl(self, x: np.ndarray) -> np.ndarray:
        J = self.jacobian(x)
        return J[:, 1, 0] - J[:, 0, 1]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.value(x)


ZERO_SCALAR = ScalarField()
ZERO_VECTOR = VectorField(ZERO_SCALAR, ZERO_SCALAR)


def mhd_forcing(params: ModelParams, u: VectorField, b: VectorField, p: ScalarField) -> Tuple[Fn, Fn]:
    """
    Right-hand sides of the strong stationary MHD equations for given exact fields:

        f = -R_nu^-1 lap u + (grad u) u + grad p - S_c curl b x b
        g = R_m^-1 S_c curl curl b - S_c curl (u x b)
    """

    def f(x: np.ndarray) -> np.ndarray:
        uv, Ju, Hu = u.value(x), u.jacobian(x), u.hessians(x)
        bv = b.value(x)
        lap = Hu[:, :, 0, 0] + Hu[:, :, 1, 1]
        conv = np.einsum("nij,nj->ni", Ju, uv)
        omega = b.curl(x)
        lorentz = np.column_stack([-bv[:, 1] * omega, bv[:, 0] * omega])
        return -lap / params.r_nu + conv + p.grad(x) - params.s_c * lorentz

    def g(x: np.ndarray) -> np.ndarray:
        uv, Ju = u.value(x), u.jacobian(x)
        bv, Jb, Hb = b.value(x), b.jacobian(x), b.hessians(x)
        # d_k of curl b = d_k d_1 b2 - d_k d_2 b1
        grad_omega = Hb[:, 1, :, 0] - Hb[:, 0, :, 1]
        # d_k of (u x b) = d_k (b2 u1 - b1 u2)
        grad_s = (
            Jb[:, 1, :] * uv[:, 0, None]
            + bv[:, 1, None] * Ju[:, 0, :]
            - Jb[:, 0, :] * uv[:, 1, None]
            - bv[:, 0, None] * Ju[:, 1, :]
        )
        curl_omega = np.column_stack([grad_omega[:, 1], -grad_omega[:, 0]])
        curl_s = np.column_stack([grad_s[:, 1], -grad_s[:, 0]])
        return params.s_c / params.r_m * curl_omega - params.s_c * curl_s

    return f, g


def zero_field(x: np.ndarray) -> np.ndarray:
    return np.zeros((len(np.atleast_2d(x)), 2))


@dataclass(frozen=True)
class ManufacturedCase:
    name: str
    params: ModelParams
    u: VectorField
    b: VectorField
    p: ScalarField
    f: Fn
    g: Fn
    bc: BCSpec
    domain: Tuple[float, float, float, float] = (0.0, 1.0, 0.0, 1.0)


def example1_fields() -> Tuple[VectorField, VectorField, ScalarField]:
    pi = np.pi
    s, c = sin1d(pi), cos1d(pi)
    s2 = product1d(s, s)
    sc = product1d(s, c)
    u = VectorField(
        ScalarField((Term(1.0, s2, sc),)),
        ScalarField((Term(-1.0, sc, s2),)),
    )
    b = VectorField(
        ScalarField((Term(1.0, s, c),)),
        ScalarField((Term(-1.0, c, s),)),
    )
    p = ScalarField((Term(1.0, c, c),))
    return u, b, p


def example1_forcing(params: ModelParams) -> Tuple[Fn, Fn]:
    u, b, p = example1_fields()
    return mhd_forcing(params, u, b, p)


def example1_case(params: ModelParams | None = None) -> ManufacturedCase:
    """Smooth solution on the unit square with no-slip u and b.n = 0."""
    params = params or ModelParams()
    u, b, p = example1_fields()
    f, g = mhd_forcing(params, u, b, p)
    return ManufacturedCase(name="example1", params=params, u=u, b=b, p=p, f=f, g=g, bc=homogeneous_bc())


# --- Hartmann channel ---


@dataclass(frozen=True)
class HartmannCase:
    params: ModelParams
    G: float = 0.1
    length: float = 6.0
    half_width: float = 1.0
    name: str = field(default="hartmann")

    @property
    def Ha(self) -> float:
        return self.params.hartmann

    @property
    def domain(self) -> Tuple[float, float, float, float]:
        return (0.0, self.length, -self.half_width, self.half_width)

    def velocity_profile(self) -> Fn1D:
        Ha, G, rnu = self.Ha, self.G, self.params.r_nu
        K = G * rnu / (Ha * np.tanh(Ha))
        return sum1d(const1d(K), scaled1d(-K / np.cosh(Ha), Fn1D(
            lambda t: np.cosh(Ha * t), lambda t: Ha * np.sinh(Ha * t), lambda t: Ha**2 * np.cosh(Ha * t)
        )))

    def magnetic_profile(self) -> Fn1D:
        Ha, G, sc = self.Ha, self.G, self.params.s_c
        sinh = Fn1D(
            lambda t: np.sinh(Ha * t) / np.sinh(Ha),
            lambda t: Ha * np.cosh(Ha * t) / np.sinh(Ha),
            lambda t: Ha**2 * np.sinh(Ha * t) / np.sinh(Ha),
        )
        return scaled1d(G / sc, sum1d(sinh, linear1d(-1.0)))

    @property
    def u(self) -> VectorField:
        return VectorField(ScalarField((Term(1.0, const1d(), self.velocity_profile()),)), ZERO_SCALAR)

    @property
    def b(self) -> VectorField:
        return VectorField(
            ScalarField((Term(1.0, const1d(), self.magnetic_profile()),)),
            ScalarField((Term(1.0, const1d(), const1d()),)),
        )

    @property
    def p(self) -> ScalarField:
        B = self.magnetic_profile()
        return ScalarField(
            (
                Term(-self.G, linear1d(), const1d()),
                Term(-0.5 * self.params.s_c, const1d(), product1d(B, B)),
            )
        )

    def f(self, x: np.ndarray) -> np.ndarray:
        return zero_field(x)

    def g(self, x: np.ndarray) -> np.ndarray:
        return zero_field(x)

    @property
    def bc(self) -> BCSpec:
        x0, x1, y0, y1 = self.domain
        b_d = lambda x: np.column_stack([np.zeros(len(np.atleast_2d(x))), np.ones(len(np.atleast_2d(x)))])  # noqa: E731
        return channel_bc(x0, x1, y0, y1, p_d=self.p.value, b_d=b_d)


HARTMANN_PRESETS = {
    "ha1": ModelParams(r_nu=1.0, r_m=0.1, s_c=10.0),
    "ha5": ModelParams(r_nu=5.0, r_m=1.0, s_c=5.0),
}
