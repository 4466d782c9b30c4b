"""Star-shaped closed curves as radial graphs rho(theta) on a uniform grid.

Index arithmetic is periodic; derivatives are central differences of order 2
or 4 and every integral is the periodic trapezoid rule, which is spectrally
accurate for smooth periodic integrands.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .exceptions import DomainError, PoleHit
from .spaceform import SpaceForm
from .utils import format_float

logger = logging.getLogger(__name__)

STENCIL_ORDERS = (2, 4)
MIN_GRID = 16


def periodic_d1(values, h, order=4):
    """Central first derivative of periodic samples."""
    p1, m1 = np.roll(values, -1), np.roll(values, 1)
    if order == 2:
        return (p1 - m1) / (2 * h)
    p2, m2 = np.roll(values, -2), np.roll(values, 2)
    return (8 * (p1 - m1) - (p2 - m2)) / (12 * h)


@dataclass(frozen=True)
class CurveFields:
    rho_t1: np.ndarray
    rho_t2: np.ndarray
    kappa: np.ndarray
    u: np.ndarray
    ds_dtheta: np.ndarray
    phi: np.ndarray
    phi_prime: np.ndarray
    Phi: np.ndarray


class ConvexityCheck(NamedTuple):
    convex: bool
    margin: float


class RadialCurve:
    """Immutable sampled radial graph over S^1 in a space form."""

    def __init__(self, sf: SpaceForm, rho, stencil_order: int = 4):
        rho = np.array(rho, dtype=float)
        if rho.ndim != 1:
            raise DomainError("rho must be a one-dimensional array")
        N = rho.size
        if N < MIN_GRID or N % 2:
            raise DomainError(f"grid size must be even and at least {MIN_GRID}; got {N}")
        if stencil_order not in STENCIL_ORDERS:
            raise DomainError(f"stencil_order must be 2 or 4; got {stencil_order!r}")
        if not np.all(np.isfinite(rho)):
            raise DomainError("rho contains non-finite values")
        if np.any(rho <= 0):
            raise DomainError(f"rho must be positive; min rho = {rho.min()!r}")
        if sf.K == 1 and rho.max() >= sf.r_limit:
            raise PoleHit(
                f"rho reaches {rho.max()!r}, beyond r_max - delta_pole = {sf.r_limit!r} (r_max = pi/2)"
            )
        rho.flags.writeable = False
        self.sf = sf
        self.rho = rho
        self.stencil_order = stencil_order

    def __repr__(self):
        return f"RadialCurve(K={self.sf.K}, N={self.N}, rho in [{self.rho.min():.6g}, {self.rho.max():.6g}])"

    @property
    def N(self):
        return self.rho.size

    @property
    def h(self):
        return 2 * math.pi / self.N

    @cached_property
    def theta(self):
        return self.h * np.arange(self.N)

    def with_rho(self, rho):
        return RadialCurve(self.sf, rho, self.stencil_order)

    def derivatives(self):
        """Periodic central differences (rho_theta, rho_theta_theta)."""
        r, h = self.rho, self.h
        rho_t1 = periodic_d1(r, h, self.stencil_order)
        # differences against the centre node keep constants exactly flat
        p1, m1 = np.roll(r, -1), np.roll(r, 1)
        if self.stencil_order == 2:
            rho_t2 = ((p1 - r) + (m1 - r)) / (h * h)
        else:
            p2, m2 = np.roll(r, -2), np.roll(r, 2)
            rho_t2 = (16 * ((p1 - r) + (m1 - r)) - ((p2 - r) + (m2 - r))) / (12 * h * h)
        return rho_t1, rho_t2

    def d_theta(self, values):
        return periodic_d1(values, self.h, self.stencil_order)

    @cached_property
    def _fields(self):
        rho_t1, rho_t2 = self.derivatives()
        phi, phi_prime, Phi = self.sf.warp(self.rho)
        q = phi * phi + rho_t1 * rho_t1
        ds = np.sqrt(q)
        kappa = (phi * phi * phi_prime + 2 * rho_t1 * rho_t1 * phi_prime - rho_t2 * phi) / (q * ds)
        u = phi * phi / ds
        return CurveFields(rho_t1, rho_t2, kappa, u, ds, phi, phi_prime, Phi)

    def fields(self) -> CurveFields:
        return self._fields

    def integrate(self, density):
        """Trapezoid sum of a per-node density against dtheta."""
        return float(self.h * np.sum(density))

    def integrate_ds(self, integrand):
        """Trapezoid sum of a per-node integrand against arclength."""
        return self.integrate(integrand * self._fields.ds_dtheta)

    def length(self):
        return self.integrate(self._fields.ds_dtheta)

    def area(self):
        return self.integrate(self._fields.Phi)

    def gauss_bonnet_residual(self):
        f = self._fields
        return self.integrate_ds(f.kappa) + self.sf.K * self.area() - 2 * math.pi

    def is_strictly_convex(self) -> ConvexityCheck:
        margin = float(self._fields.kappa.min())
        return ConvexityCheck(margin > 0, margin)

    def gradient_monitor(self):
        f = self._fields
        return float(np.max(np.abs(f.rho_t1) / f.phi))

    def fourier_amplitude(self, m):
        """Amplitude of the cos/sin pair of mode m in rho."""
        coeffs = np.fft.rfft(self.rho)
        return float(2 * abs(coeffs[m]) / self.N)

    def to_csv(self, path):
        path = Path(path)
        lines = [f"# K={self.sf.K} N={self.N}", "theta,rho"]
        lines += [f"{format_float(t)},{format_float(r)}" for t, r in zip(self.theta, self.rho)]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    @classmethod
    def from_csv(cls, path, stencil_order=4, delta_pole=None):
        text = Path(path).read_text(encoding="utf-8").splitlines()
        if not text or not text[0].startswith("#"):
            raise DomainError(f"{path}: missing '# K=<k> N=<n>' header")
        header = dict(item.split("=", 1) for item in text[0].lstrip("#").split())
        try:
            K, N = int(header["K"]), int(header["N"])
        except (KeyError, ValueError):
            raise DomainError(f"{path}: malformed header {text[0]!r}")
        rows = [line for line in text[1:] if line and not line.startswith(("#", "theta"))]
        rho = [float(line.split(",")[1]) for line in rows]
        if len(rho) != N:
            raise DomainError(f"{path}: header announces N={N} but {len(rho)} rows follow")
        sf = SpaceForm(K) if delta_pole is None else SpaceForm(K, delta_pole)
        return cls(sf, rho, stencil_order)
