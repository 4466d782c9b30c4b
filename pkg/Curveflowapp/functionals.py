"""Inequality margins, identity residuals and the per-curve GeometryReport."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields as dataclass_fields
from typing import Optional

import numpy as np

from .curve import RadialCurve
from .exceptions import DegenerateArgmax, DomainError, NotConvexError

EPS_CONVEX = 1e-10
TWO_PI = 2 * math.pi


def eps_quad(L):
    """Acceptance slack for inequality margins."""
    return 1e-8 * max(1.0, L * L)


def _require_strictly_convex(c, what):
    check = c.is_strictly_convex()
    if not check.convex:
        raise NotConvexError(f"{what} needs a strictly convex curve; min kappa = {check.margin!r}", check.margin)


def _require_convex(c, what, eps_convex):
    margin = c.is_strictly_convex().margin
    if margin < -eps_convex:
        raise NotConvexError(f"{what} needs a convex curve; min kappa = {margin!r}", margin)


def minkowski_residual(c: RadialCurve):
    f = c.fields()
    return c.integrate_ds(f.phi_prime - f.kappa * f.u)


def hk_gap(c: RadialCurve):
    """Heintze-Karcher gap: int (phi'/kappa - u) ds, non-negative on convex curves."""
    _require_strictly_convex(c, "hk_gap")
    f = c.fields()
    return c.integrate_ds(f.phi_prime / f.kappa - f.u)


def weighted_phi_kappa(c: RadialCurve):
    f = c.fields()
    return c.integrate_ds(f.Phi * f.kappa)


def weighted_margin(c: RadialCurve, eps_convex=EPS_CONVEX):
    _require_convex(c, "weighted_margin", eps_convex)
    L, A = c.length(), c.area()
    return weighted_phi_kappa(c) - (L * L - TWO_PI * A) / TWO_PI


def monotone_functional(c: RadialCurve):
    return weighted_phi_kappa(c) + c.area()


def corollary_margin(c: RadialCurve, eps_convex=EPS_CONVEX):
    K = c.sf.K
    if K == 0:
        raise DomainError("corollary_margin is stated only for K=-1 and K=+1")
    _require_convex(c, "corollary_margin", eps_convex)
    f = c.fields()
    L = c.length()
    if K == -1:
        return c.integrate_ds(f.kappa * f.phi_prime) - (TWO_PI + L * L / TWO_PI)
    return (TWO_PI - L * L / TWO_PI) - c.integrate_ds(f.kappa * f.phi_prime)


def nonconvex_margin(c: RadialCurve):
    if c.sf.K != -1:
        raise DomainError("nonconvex_margin is stated only in the hyperbolic plane (K=-1)")
    f = c.fields()
    A = c.area()
    return c.integrate_ds(f.Phi * np.abs(f.kappa)) - (A + A * A / TWO_PI)


def _unit_vector(y):
    y = np.asarray(y, dtype=float)
    if y.shape != (3,):
        raise DomainError(f"y must be a point of R^3; got shape {y.shape}")
    if abs(np.linalg.norm(y) - 1.0) > 1e-10:
        raise DomainError(f"y must be a unit vector; |y| = {np.linalg.norm(y)!r}")
    return y


def embedded_points(c: RadialCurve):
    return c.sf.embed_unit_sphere(c.rho, c.theta)


def kappa_moment(c: RadialCurve):
    """v = int kappa x ds with x the embedded curve point."""
    f = c.fields()
    weights = c.h * f.kappa * f.ds_dtheta
    return weights @ embedded_points(c)


def gp_functional(c: RadialCurve, y):
    """F(y) = int kappa(x) <x, y> ds over the curve on the unit sphere."""
    if c.sf.K != 1:
        raise DomainError("gp_functional is defined only for K=+1")
    y = _unit_vector(y)
    return float(kappa_moment(c) @ y)


def gp_argmax(c: RadialCurve):
    if c.sf.K != 1:
        raise DomainError("gp_argmax is defined only for K=+1")
    _require_strictly_convex(c, "gp_argmax")
    v = kappa_moment(c)
    norm = float(np.linalg.norm(v))
    if norm <= 1e-12:
        raise DegenerateArgmax(f"int kappa x ds vanishes (|v| = {norm!r})")
    return v / norm


def require_open_hemisphere(c: RadialCurve, y):
    height = float(np.min(embedded_points(c) @ _unit_vector(y)))
    if height <= 0:
        raise DomainError(f"curve leaves the open hemisphere about y; min <x, y> = {height!r}")


def gp_counterexample_gap(c: RadialCurve):
    """Delta = (2pi - L^2/2pi) - max_y F(y); positive values refute the n=2 conjecture."""
    y0 = gp_argmax(c)
    require_open_hemisphere(c, y0)
    L = c.length()
    return (TWO_PI - L * L / TWO_PI) - gp_functional(c, y0)


@dataclass(frozen=True)
class GeometryReport:
    K: int
    N: int
    L: float
    A: float
    deficit: float
    minkowski_residual: float
    hk_gap: Optional[float]
    weighted_phi_kappa: float
    weighted_margin: Optional[float]
    corollary_margin: Optional[float]
    nonconvex_margin: Optional[float]
    monotone_functional: float
    gb_residual: float
    kappa_min: float
    kappa_max: float
    rho_min: float
    rho_max: float
    u_min: float
    u_max: float
    grad_monitor: float

    @classmethod
    def field_names(cls):
        return [f.name for f in dataclass_fields(cls)]

    def to_dict(self):
        return asdict(self)


def geometry_report(c: RadialCurve, eps_convex=EPS_CONVEX) -> GeometryReport:
    f = c.fields()
    L, A = c.length(), c.area()
    K = c.sf.K
    strictly_convex = c.is_strictly_convex().convex
    convex = f.kappa.min() >= -eps_convex
    wpk = weighted_phi_kappa(c)
    return GeometryReport(
        K=K,
        N=c.N,
        L=L,
        A=A,
        deficit=L * L - 4 * math.pi * A + K * A * A,
        minkowski_residual=minkowski_residual(c),
        hk_gap=hk_gap(c) if strictly_convex else None,
        weighted_phi_kappa=wpk,
        weighted_margin=wpk - (L * L - TWO_PI * A) / TWO_PI if convex else None,
        corollary_margin=corollary_margin(c, eps_convex) if convex and K != 0 else None,
        nonconvex_margin=nonconvex_margin(c) if K == -1 else None,
        monotone_functional=wpk + A,
        gb_residual=c.gauss_bonnet_residual(),
        kappa_min=float(f.kappa.min()),
        kappa_max=float(f.kappa.max()),
        rho_min=float(c.rho.min()),
        rho_max=float(c.rho.max()),
        u_min=float(f.u.min()),
        u_max=float(f.u.max()),
        grad_monitor=c.gradient_monitor(),
    )
