"""Method-of-lines evolution of radial graphs under a normal speed law.

A curve moving with outward normal speed F has radial graph velocity
d rho/dt = F * sqrt(1 + rho_theta^2 / phi(rho)^2). The semidiscrete system is
advanced with classical RK4 and a step recomputed from the parabolic CFL
bound at every step.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from django.db import models
from scipy.signal import resample

from .curve import RadialCurve
from .exceptions import DomainError, FitWindowError, NotConvexError, PoleHit, StepUnderflow
from .functionals import EPS_CONVEX, GeometryReport, geometry_report

logger = logging.getLogger(__name__)

MIN_DT = 1e-14
MIN_FIT_SAMPLES = 20


class SpeedLaw(models.TextChoices):
    CONSTRAINED_ICF = 'constrained_icf', 'Constrained inverse curvature flow'
    CURVE_SHORTENING = 'curve_shortening', 'Curve shortening flow'
    CLASSICAL_ICF = 'classical_icf', 'Classical inverse curvature flow'

    @property
    def requires_convexity(self):
        return self is not SpeedLaw.CURVE_SHORTENING


class FlowStatus(models.TextChoices):
    CONVERGED = 'converged', 'Converged'
    TIME_LIMIT = 'time_limit', 'Time limit'
    CONVEXITY_LOST = 'convexity_lost', 'Convexity lost'
    POLE_HIT = 'pole_hit', 'Pole hit'
    STEP_UNDERFLOW = 'step_underflow', 'Step underflow'
    SINGULARITY = 'singularity', 'Singularity ahead'


FAILURE_STATUSES = {
    FlowStatus.CONVEXITY_LOST,
    FlowStatus.POLE_HIT,
    FlowStatus.STEP_UNDERFLOW,
    FlowStatus.SINGULARITY,
}


@dataclass(frozen=True)
class FlowConfig:
    sigma: float = 0.1
    t_end: float = 50.0
    eps_stationary: float = 1e-9
    report_stride: int = 100
    snapshot_stride: int = 1
    dt_max: float = 0.01
    refine_on_failure: bool = False
    eps_convex: float = EPS_CONVEX

    def __post_init__(self):
        if not 0 < self.sigma <= 0.5:
            raise DomainError(f"sigma must lie in (0, 0.5]; got {self.sigma!r}")
        if not self.t_end > 0:
            raise DomainError(f"t_end must be positive; got {self.t_end!r}")
        if self.report_stride < 1 or self.snapshot_stride < 0:
            raise DomainError("report_stride must be >= 1 and snapshot_stride >= 0")
        if not self.dt_max > 0:
            raise DomainError(f"dt_max must be positive; got {self.dt_max!r}")


@dataclass(frozen=True)
class Violation:
    name: str
    time: float
    magnitude: float

    def to_dict(self):
        return {"name": self.name, "time": self.time, "magnitude": self.magnitude}


@dataclass
class FlowTrace:
    law: SpeedLaw
    config: FlowConfig
    initial: RadialCurve
    times: list = field(default_factory=list)
    reports: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    status: Optional[FlowStatus] = None
    steps: int = 0
    refined: bool = False
    final: Optional[RadialCurve] = None

    @property
    def t_final(self):
        return self.times[-1] if self.times else 0.0

    @property
    def failed(self):
        return self.status in FAILURE_STATUSES

    def limit_radius(self):
        """Radius of the circle with the initial length: rho_inf = inverse_warp(L0 / 2pi)."""
        return self.initial.sf.inverse_warp(self.reports[0].L / (2 * math.pi))

    def limit_error(self):
        return float(np.max(np.abs(self.final.rho - self.limit_radius())))

    def summary(self):
        out = {
            "status": self.status.value if self.status else None,
            "law": self.law.value,
            "K": self.initial.sf.K,
            "N": self.initial.N,
            "t_final": self.t_final,
            "steps": self.steps,
            "refined": self.refined,
            "violations": [v.to_dict() for v in self.violations],
        }
        if self.law is SpeedLaw.CONSTRAINED_ICF and self.final is not None:
            out["limit_radius"] = self.limit_radius()
            out["limit_error"] = self.limit_error()
        return out


def _check_convexity(c, law):
    if law.requires_convexity:
        check = c.is_strictly_convex()
        if not check.convex:
            raise NotConvexError(f"{law.label} needs a strictly convex curve; min kappa = {check.margin!r}",
                                 check.margin)


def normal_speed(c: RadialCurve, law: SpeedLaw):
    law = SpeedLaw(law)
    _check_convexity(c, law)
    f = c.fields()
    if law is SpeedLaw.CONSTRAINED_ICF:
        return f.phi_prime / f.kappa - f.u
    if law is SpeedLaw.CURVE_SHORTENING:
        return -f.kappa
    return 1.0 / f.kappa


def rhs(c: RadialCurve, law: SpeedLaw):
    """d rho / dt at every grid node."""
    f = c.fields()
    return normal_speed(c, law) * f.ds_dtheta / f.phi


def diffusivity(c: RadialCurve, law: SpeedLaw):
    """Coefficient of rho_theta_theta in the linearised right-hand side."""
    law = SpeedLaw(law)
    _check_convexity(c, law)
    f = c.fields()
    q = f.ds_dtheta ** 2
    if law is SpeedLaw.CONSTRAINED_ICF:
        return np.abs(f.phi_prime) / (f.kappa ** 2 * q)
    if law is SpeedLaw.CURVE_SHORTENING:
        return 1.0 / q
    return 1.0 / (f.kappa ** 2 * q)


def stable_dt(c: RadialCurve, law: SpeedLaw, sigma=0.1):
    D = float(diffusivity(c, law).max())
    dt = sigma * c.h ** 2 / D if D > 0 else math.inf
    if dt < MIN_DT:
        raise StepUnderflow(f"stable step {dt!r} fell below {MIN_DT!r}")
    return dt


def _stage(c, rho):
    if not np.all(np.isfinite(rho)):
        raise FloatingPointError("non-finite radius in a Runge-Kutta stage")
    return c.with_rho(rho)


def step(c: RadialCurve, law: SpeedLaw, dt, k1=None) -> RadialCurve:
    """One classical RK4 step of the semidiscrete system."""
    rho = c.rho
    if k1 is None:
        k1 = rhs(c, law)
    k2 = rhs(_stage(c, rho + 0.5 * dt * k1), law)
    k3 = rhs(_stage(c, rho + 0.5 * dt * k2), law)
    k4 = rhs(_stage(c, rho + dt * k3), law)
    return _stage(c, rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))


def curvature_evolution_residual(c: RadialCurve, c_next: RadialCurve, law: SpeedLaw, dt):
    """sup | d kappa/dt - (-F_ss - (kappa^2 + K) F + w kappa_s) | over one step.

    Grid points move radially, so the curvature at fixed theta also picks up the
    tangential drift w = rho_t rho_theta / ds.
    """
    f = c.fields()
    F = normal_speed(c, law)
    ds = f.ds_dtheta
    F_s = c.d_theta(F) / ds
    F_ss = c.d_theta(F_s) / ds
    kappa_s = c.d_theta(f.kappa) / ds
    w = (F * ds / f.phi) * f.rho_t1 / ds
    predicted = -F_ss - (f.kappa ** 2 + c.sf.K) * F + w * kappa_s
    measured = (c_next.fields().kappa - f.kappa) / dt
    return float(np.max(np.abs(measured - predicted)))


class InvariantMonitor:
    """Checks the monotone and bounded quantities of a run at every report."""

    def __init__(self, c0: RadialCurve, law: SpeedLaw, report0: GeometryReport):
        self.law = law
        self.K = c0.sf.K
        self.first = report0
        self.previous = report0
        phi_min = c0.sf.warp(report0.rho_min)[0]
        self.u_floor = phi_min / math.sqrt(1 + report0.grad_monitor ** 2) * (1 - 1e-6)
        self.stencil_order = c0.stencil_order
        self.h = c0.h

    def observe(self, t, report: GeometryReport, diagnostics=None):
        found = []

        def check(name, excess):
            if excess > 0:
                found.append(Violation(name, t, float(excess)))

        first, prev = self.first, self.previous
        if self.law is SpeedLaw.CONSTRAINED_ICF:
            check("length", abs(report.L - first.L) / first.L - 1e-5)
            check("area", (prev.A - 1e-8) - report.A)
            check("deficit", report.deficit - (prev.deficit + 1e-8))
            check("kappa_lower", (first.kappa_min - 1e-6) - report.kappa_min)
            check("kappa_upper", report.kappa_max - (first.kappa_max + 1e-6))
            check("rho_lower", (first.rho_min - 1e-8) - report.rho_min)
            check("rho_upper", report.rho_max - (first.rho_max + 1e-8))
            check("gradient", report.grad_monitor - (prev.grad_monitor + 1e-6))
            check("monotone_functional", report.monotone_functional - (prev.monotone_functional + 1e-8))
            check("support", self.u_floor - report.u_min)
        elif self.K == 0 and self.law is SpeedLaw.CLASSICAL_ICF:
            expected = first.L * math.exp(t)
            check("classical_length_growth", abs(report.L - expected) / expected - 1e-4)
        elif self.K == 0 and self.law is SpeedLaw.CURVE_SHORTENING:
            check("shortening_area_loss", abs(report.A - (first.A - 2 * math.pi * t)) - 1e-6)
        if diagnostics and diagnostics.get("dL_residual") is not None:
            tol = 10 * (diagnostics["dt"] + self.h ** self.stencil_order) * max(1.0, report.L)
            check("length_identity", diagnostics["dL_residual"] - tol)
            check("area_identity", diagnostics["dA_residual"] - tol)
        self.previous = report
        for v in found:
            logger.warning("monitor %s violated at t=%.6g by %.3e", v.name, v.time, v.magnitude)
        return found


def _rates(c, law, k1=None):
    """(int F kappa ds, int F ds): dL/dt and dA/dt predicted by the first variation."""
    f = c.fields()
    F = normal_speed(c, law) if k1 is None else k1 * f.phi / f.ds_dtheta
    return c.integrate_ds(F * f.kappa), c.integrate_ds(F)


def _identity_diagnostics(c, c_next, law, dt, k1):
    """Difference quotients of L and A over one step against the trapezoid mean of their rates."""
    dL_now, dA_now = _rates(c, law, k1)
    try:
        dL_next, dA_next = _rates(c_next, law)
    except NotConvexError:
        dL_next, dA_next = dL_now, dA_now
    dL = (c_next.length() - c.length()) / dt
    dA = (c_next.area() - c.area()) / dt
    return {
        "dt": dt,
        "dL_residual": abs(dL - 0.5 * (dL_now + dL_next)),
        "dA_residual": abs(dA - 0.5 * (dA_now + dA_next)),
        "kappa_evolution_residual": curvature_evolution_residual(c, c_next, law, dt),
    }


def _singular(c: RadialCurve):
    if c.rho.min() < 10 * c.h:
        return True
    kappa = c.fields().kappa
    if kappa.min() > 0:
        ratio = kappa.max() / kappa.min()
    else:
        ratio = np.abs(kappa).max() * c.length() / (2 * math.pi)
    return ratio > 1e6


def _integrate(c0: RadialCurve, law: SpeedLaw, config: FlowConfig) -> FlowTrace:
    _check_convexity(c0, law)
    trace = FlowTrace(law=law, config=config, initial=c0)
    report0 = geometry_report(c0, config.eps_convex)
    monitor = InvariantMonitor(c0, law, report0)
    n_reports = 0

    def record(t, c, report=None):
        nonlocal n_reports
        trace.times.append(t)
        trace.reports.append(report or geometry_report(c, config.eps_convex))
        trace.diagnostics.append({"dt": None, "dL_residual": None, "dA_residual": None,
                                  "kappa_evolution_residual": None})
        stride = config.snapshot_stride
        if n_reports == 0 or (stride and n_reports % stride == 0):
            trace.snapshots.append((t, c))
        n_reports += 1

    c, t = c0, 0.0
    record(t, c, report0)
    diagnostics_due = True
    while True:
        try:
            k1 = rhs(c, law)
        except NotConvexError:
            trace.status = FlowStatus.CONVEXITY_LOST
            break
        speed = float(np.max(np.abs(k1)))
        if speed < config.eps_stationary:
            trace.status = FlowStatus.CONVERGED
            break
        if t >= config.t_end * (1 - 1e-12):
            trace.status = FlowStatus.TIME_LIMIT
            break
        if law is SpeedLaw.CURVE_SHORTENING and _singular(c):
            trace.status = FlowStatus.SINGULARITY
            break
        try:
            dt = min(stable_dt(c, law, config.sigma), config.dt_max, config.t_end - t)
            c_next = step(c, law, dt, k1)
        except StepUnderflow:
            trace.status = FlowStatus.STEP_UNDERFLOW
            break
        except PoleHit:
            trace.status = FlowStatus.POLE_HIT
            break
        except NotConvexError:
            trace.status = FlowStatus.CONVEXITY_LOST
            break
        except DomainError:
            # radius collapsed through zero
            trace.status = FlowStatus.SINGULARITY
            break
        if diagnostics_due:
            trace.diagnostics[-1] = _identity_diagnostics(c, c_next, law, dt, k1)
            trace.violations += monitor.observe(trace.times[-1], trace.reports[-1], trace.diagnostics[-1])
            diagnostics_due = False
        c, t = c_next, t + dt
        trace.steps += 1
        if trace.steps % config.report_stride == 0:
            record(t, c)
            diagnostics_due = True
            logger.debug("t=%.6g dt=%.3e sup|rhs|=%.3e", t, dt, speed)
    if trace.times[-1] != t:
        record(t, c)
        diagnostics_due = True
    if diagnostics_due:
        trace.violations += monitor.observe(t, trace.reports[-1], None)
    if trace.snapshots[-1][0] != t:
        trace.snapshots.append((t, c))
    trace.final = c
    logger.info("%s on K=%d N=%d finished: %s at t=%.6g after %d steps",
                law.label, c0.sf.K, c0.N, trace.status.label, t, trace.steps)
    return trace


def refine(c: RadialCurve) -> RadialCurve:
    """The same curve on a grid of twice the size, by Fourier interpolation."""
    return c.with_rho(resample(c.rho, 2 * c.N))


def run(c0: RadialCurve, law: SpeedLaw, config: FlowConfig = None) -> FlowTrace:
    config = config or FlowConfig()
    law = SpeedLaw(law)
    trace = _integrate(c0, law, config)
    if trace.failed and config.refine_on_failure:
        logger.warning("%s failed with %s; retrying with N=%d and sigma=%.3g",
                       law.label, trace.status.label, 2 * c0.N, config.sigma / 2)
        trace = _integrate(refine(c0), law, replace(config, sigma=config.sigma / 2))
        trace.refined = True
    return trace


@dataclass
class DecayFit:
    m: int
    measured_rate: float
    predicted_rate: float
    rho_inf: float
    samples: int
    t_start: float
    t_stop: float
    l2_rate: float
    l2_bound: float
    times: np.ndarray
    amplitudes: np.ndarray

    @property
    def relative_error(self):
        return abs(self.measured_rate - self.predicted_rate) / self.predicted_rate

    @property
    def l2_dominates(self):
        return self.l2_rate >= self.l2_bound

    def to_dict(self):
        return {
            "m": self.m,
            "measured": self.measured_rate,
            "predicted": self.predicted_rate,
            "relative_error": self.relative_error,
            "rho_inf": self.rho_inf,
            "samples": self.samples,
            "t_start": self.t_start,
            "t_stop": self.t_stop,
            "l2_rate": self.l2_rate,
            "l2_bound": self.l2_bound,
            "l2_dominates": self.l2_dominates,
        }


def decay_rate(trace: FlowTrace, m: int, floor=1e-11) -> DecayFit:
    """Fit the late-time exponential decay of Fourier mode m.

    The window opens once the amplitude drops below 10% of its initial value
    and closes at `floor`; the prediction is the linearised eigenvalue
    m^2 / phi'(rho_inf).
    """
    if trace.law is not SpeedLaw.CONSTRAINED_ICF:
        raise FitWindowError("decay rates are defined for the constrained flow only")
    if trace.status not in (FlowStatus.CONVERGED, FlowStatus.TIME_LIMIT):
        raise FitWindowError(f"cannot fit a trace that ended with {trace.status.label}")
    if trace.status is not FlowStatus.CONVERGED:
        logger.warning("fitting decay on a trace stopped by the time limit")
    sf = trace.initial.sf
    rho_inf = trace.limit_radius()
    times = np.array([t for t, _ in trace.snapshots])
    amplitudes = np.array([c.fourier_amplitude(m) for _, c in trace.snapshots])
    l2 = np.array([math.sqrt(c.integrate((c.rho - c.rho.mean()) ** 2)) for _, c in trace.snapshots])

    below = np.nonzero(amplitudes < 0.1 * amplitudes[0])[0]
    if below.size == 0:
        raise FitWindowError(f"mode {m} never fell below 10% of its initial amplitude")
    start = below[0]
    stop = start
    while stop < amplitudes.size and amplitudes[stop] > floor:
        stop += 1
    window = slice(start, stop)
    samples = stop - start
    if samples < MIN_FIT_SAMPLES:
        raise FitWindowError(f"only {samples} samples in the fit window; need {MIN_FIT_SAMPLES}")
    slope = np.polyfit(times[window], np.log(amplitudes[window]), 1)[0]
    l2_slope = np.polyfit(times[window], np.log(l2[window]), 1)[0]
    phi_prime_inf = sf.warp(rho_inf)[1]
    return DecayFit(
        m=m,
        measured_rate=float(-slope),
        predicted_rate=m * m / phi_prime_inf,
        rho_inf=rho_inf,
        samples=int(samples),
        t_start=float(times[start]),
        t_stop=float(times[stop - 1]),
        l2_rate=float(-l2_slope),
        l2_bound=1.0 / (8 * phi_prime_inf),
        times=times,
        amplitudes=amplitudes,
    )


def rescaled_classical(trace: FlowTrace):
    """Snapshots of a K=0 classical flow shrunk by exp(-t).

    In the plane these follow the constrained flow from the same initial curve.
    """
    if trace.law is not SpeedLaw.CLASSICAL_ICF or trace.initial.sf.K != 0:
        raise DomainError("rescaling equivalence holds for the classical flow in the plane only")
    return [(t, c.with_rho(math.exp(-t) * c.rho)) for t, c in trace.snapshots]
