import logging
import math
from dataclasses import dataclass, field

import numpy as np
from django.db import models

from .curve import RadialCurve
from .exceptions import DomainError, SamplerRejection
from .spaceform import SpaceForm
from .utils import SplitMix64

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 1000
RANDOM_MODES = range(1, 9)
NONCONVEX_MODES = range(2, 9)


class CurveKind(models.TextChoices):
    CIRCLE = 'circle', 'Geodesic circle'
    FOURIER = 'fourier', 'Fourier perturbation of a circle'
    ELLIPSE = 'ellipse', 'Planar ellipse'
    RANDOM = 'random', 'Random convex curve'


@dataclass
class CurveSpec:
    kind: CurveKind = CurveKind.CIRCLE
    r0: float = 1.0
    cos_modes: dict = field(default_factory=dict)
    sin_modes: dict = field(default_factory=dict)
    a: float = 2.0
    b: float = 1.0
    seed: int = 0

    def describe(self):
        return {
            "kind": CurveKind(self.kind).value,
            "r0": self.r0,
            "cos_modes": {str(m): v for m, v in sorted(self.cos_modes.items())},
            "sin_modes": {str(m): v for m, v in sorted(self.sin_modes.items())},
            "a": self.a,
            "b": self.b,
            "seed": self.seed,
        }


def theta_grid(N):
    return 2 * math.pi / N * np.arange(N)


def fourier_rho(r0, cos_modes, sin_modes, N):
    theta = theta_grid(N)
    shape = np.ones(N)
    for m, a_m in cos_modes.items():
        shape += a_m * np.cos(m * theta)
    for m, b_m in sin_modes.items():
        shape += b_m * np.sin(m * theta)
    return r0 * shape


def ellipse_rho(a, b, N):
    theta = theta_grid(N)
    return a * b / np.sqrt(b * b * np.cos(theta) ** 2 + a * a * np.sin(theta) ** 2)


def _draw_modes(rng, modes, bound):
    cos_modes, sin_modes = {}, {}
    for m in modes:
        cos_modes[m] = rng.uniform(-bound(m), bound(m))
        sin_modes[m] = rng.uniform(-bound(m), bound(m))
    return cos_modes, sin_modes


def sample_random(sf: SpaceForm, N, seed, r0=1.0, convex=True, stencil_order=4):
    """Seeded random star-shaped curve.

    Convex draws use modes 1..8 with |a_m|, |b_m| <= 0.3/m^3 and are rejected
    until strictly convex; non-convex draws use modes 2..8 with bound
    0.6/m^1.5 and are rejected until some curvature is negative.
    """
    rng = SplitMix64(seed)
    if convex:
        modes, bound = RANDOM_MODES, lambda m: 0.3 / m ** 3
    else:
        modes, bound = NONCONVEX_MODES, lambda m: 0.6 / m ** 1.5
    for attempt in range(MAX_ATTEMPTS):
        cos_modes, sin_modes = _draw_modes(rng, modes, bound)
        rho = fourier_rho(r0, cos_modes, sin_modes, N)
        if rho.min() <= 0 or rho.max() >= sf.r_limit:
            continue
        c = RadialCurve(sf, rho, stencil_order)
        if c.is_strictly_convex().convex == convex:
            return c, CurveSpec(CurveKind.FOURIER, r0, cos_modes, sin_modes, seed=seed)
    logger.warning("sampler gave up after %d draws (seed=%d, K=%d)", MAX_ATTEMPTS, seed, sf.K)
    raise SamplerRejection(f"no acceptable curve in {MAX_ATTEMPTS} draws for seed {seed}")


def generate(spec: CurveSpec, sf: SpaceForm, N, stencil_order=4) -> RadialCurve:
    kind = CurveKind(spec.kind)
    if spec.r0 <= 0 or spec.r0 >= sf.r_limit:
        raise DomainError(f"r0 = {spec.r0!r} outside (0, r_max) with r_max = {sf.r_max!r} for K={sf.K}")
    if kind is CurveKind.CIRCLE:
        rho = np.full(N, float(spec.r0))
    elif kind is CurveKind.FOURIER:
        rho = fourier_rho(spec.r0, spec.cos_modes, spec.sin_modes, N)
    elif kind is CurveKind.ELLIPSE:
        if sf.K != 0:
            raise DomainError("ellipse curves are generated in the plane (K=0) only")
        if not (spec.a > 0 and spec.b > 0):
            raise DomainError("ellipse semi-axes must be positive")
        rho = ellipse_rho(spec.a, spec.b, N)
    else:
        c, _ = sample_random(sf, N, spec.seed, spec.r0, stencil_order=stencil_order)
        return c
    return RadialCurve(sf, rho, stencil_order)
