"""Closed-form geometry of the model surfaces M^2(K), K in {-1, 0, +1}.

Each surface is the warped product dr^2 + phi(r)^2 dtheta^2 with
phi'' = -K phi, phi(0) = 0, phi'(0) = 1, and area element phi(r) dr dtheta.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

DELTA_POLE = 1e-6

SPACE_FORM_NAMES = {
    -1: "hyperbolic plane",
    0: "Euclidean plane",
    1: "open hemisphere",
}


@dataclass(frozen=True)
class SpaceForm:
    K: int
    delta_pole: float = DELTA_POLE

    def __post_init__(self):
        if self.K not in SPACE_FORM_NAMES:
            raise DomainError(f"K must be one of -1, 0, 1; got {self.K!r}")
        if not 0.0 <= self.delta_pole < 0.1:
            raise DomainError(f"delta_pole out of range: {self.delta_pole!r}")

    @property
    def name(self):
        return SPACE_FORM_NAMES[self.K]

    @property
    def r_max(self):
        return math.pi / 2 if self.K == 1 else math.inf

    @property
    def r_limit(self):
        """Largest radius a curve may reach: r_max less the pole margin."""
        return self.r_max - self.delta_pole if self.K == 1 else math.inf

    def check_radius(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(~np.isfinite(r)) or np.any(r < 0):
            raise DomainError("radius must be finite and non-negative")
        if np.any(r >= self.r_max):
            raise DomainError(f"radius must stay below r_max = {self.r_max!r} on the {self.name} (K={self.K})")
        return r

    def warp(self, r):
        """Return (phi, phi', Phi) at r; scalar in, scalars out, array in, arrays out."""
        r = self.check_radius(r)
        if self.K == -1:
            phi, phi_prime = np.sinh(r), np.cosh(r)
            Phi = 2.0 * np.sinh(r / 2) ** 2
        elif self.K == 0:
            phi, phi_prime = r.copy(), np.ones_like(r)
            Phi = r * r / 2
        else:
            phi, phi_prime = np.sin(r), np.cos(r)
            Phi = 2.0 * np.sin(r / 2) ** 2
        if r.ndim == 0:
            return float(phi), float(phi_prime), float(Phi)
        return phi, phi_prime, Phi

    def inverse_warp(self, ell):
        """Radius of the geodesic circle whose circumference is 2*pi*ell."""
        ell = float(ell)
        if not math.isfinite(ell) or ell <= 0:
            raise DomainError(f"inverse_warp needs ell > 0; got {ell!r}")
        if self.K == -1:
            return math.asinh(ell)
        if self.K == 0:
            return ell
        if ell >= 1:
            raise DomainError(f"inverse_warp needs ell < 1 on the hemisphere; got {ell!r}")
        return math.asin(ell)

    def embed_unit_sphere(self, r, theta):
        """Points of the hemisphere as unit vectors of R^3, pole at (0, 0, 1)."""
        if self.K != 1:
            raise DomainError("the unit-sphere embedding exists only for K=+1")
        r = self.check_radius(r)
        theta = np.asarray(theta, dtype=float)
        s = np.sin(r)
        point = np.stack(np.broadcast_arrays(s * np.cos(theta), s * np.sin(theta), np.cos(r)), axis=-1)
        return point

    def circle_curvature(self, r):
        phi, phi_prime, _ = self.warp(r)
        return phi_prime / phi

    def circle_length(self, r):
        return 2 * math.pi * self.warp(r)[0]

    def circle_area(self, r):
        return 2 * math.pi * self.warp(r)[2]
