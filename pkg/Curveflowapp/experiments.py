"""Experiment drivers behind the management commands.

Each `cmd_*` takes a resolved configuration dict, writes its artifacts under
`out` and returns an ExperimentResult whose exit code the command reports.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import exports, plots
from .curve import RadialCurve
from .exceptions import ConfigError, CurveflowError, NotConvexError
from .flow import FlowConfig, FlowStatus, SpeedLaw, decay_rate, run
from .functionals import (
    EPS_CONVEX,
    eps_quad,
    geometry_report,
    gp_argmax,
    gp_counterexample_gap,
    gp_functional,
    minkowski_residual,
)
from .generators import CurveKind, CurveSpec, generate, sample_random
from .spaceform import DELTA_POLE, SpaceForm
from .utils import derive_seed

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_FLOW_FAILURE = 2
EXIT_ASSERTION = 3

COMMON_SCHEMA = {
    "K": int,
    "N": int,
    "seed": int,
    "out": str,
    "stencil_order": int,
    "delta_pole": float,
    "eps_convex": float,
}
COMMON_DEFAULTS = {
    "K": 0,
    "N": 256,
    "seed": 0,
    "out": "out",
    "stencil_order": 4,
    "delta_pole": DELTA_POLE,
    "eps_convex": EPS_CONVEX,
}

CURVE_SCHEMA = {
    "kind": str,
    "r0": float,
    "modes": "int_list",
    "cos": "float_list",
    "sin": "float_list",
    "a": float,
    "b": float,
    "curve": str,
}
CURVE_DEFAULTS = {"kind": "circle", "r0": 1.0, "modes": [], "cos": [], "sin": [], "a": 2.0, "b": 1.0, "curve": ""}

FLOW_SCHEMA = {
    "law": str,
    "sigma": float,
    "t_end": float,
    "eps_stationary": float,
    "report_stride": int,
    "snapshot_stride": int,
    "dt_max": float,
    "refine_on_failure": bool,
    "svg": bool,
}
FLOW_DEFAULTS = {
    "law": SpeedLaw.CONSTRAINED_ICF.value,
    "sigma": 0.1,
    "t_end": 50.0,
    "eps_stationary": 1e-9,
    "report_stride": 100,
    "snapshot_stride": 10,
    "dt_max": 0.01,
    "refine_on_failure": False,
    "svg": True,
}

SIMULATE_SCHEMA = {**COMMON_SCHEMA, **CURVE_SCHEMA, **FLOW_SCHEMA}
SIMULATE_DEFAULTS = {**COMMON_DEFAULTS, **CURVE_DEFAULTS, **FLOW_DEFAULTS}

REPORT_SCHEMA = {**COMMON_SCHEMA, **CURVE_SCHEMA}
REPORT_DEFAULTS = {**COMMON_DEFAULTS, **CURVE_DEFAULTS}

SWEEP_SCHEMA = {**COMMON_SCHEMA, "n": int, "r0": float, "nonconvex": bool, "workers": int}
SWEEP_DEFAULTS = {**COMMON_DEFAULTS, "N": 512, "n": 200, "r0": 1.0, "nonconvex": False, "workers": 1}

COUNTEREXAMPLE_SCHEMA = {**COMMON_SCHEMA, "r0": float, "eps": float, "m": int}
COUNTEREXAMPLE_DEFAULTS = {**COMMON_DEFAULTS, "K": 1, "N": 2048, "r0": 0.8, "eps": 0.05, "m": 2}

RATE_SCHEMA = {**COMMON_SCHEMA, "r0": float, "m": int, "eps": float, "sigma": float, "t_end": float,
               "eps_stationary": float, "report_stride": int, "tolerance": float}
RATE_DEFAULTS = {**COMMON_DEFAULTS, "N": 128, "r0": 1.0, "m": 2, "eps": 1e-3, "sigma": 0.1, "t_end": 60.0,
                 "eps_stationary": 1e-11, "report_stride": 10, "tolerance": 0.10}

CONVERGENCE_SCHEMA = {**COMMON_SCHEMA, **CURVE_SCHEMA, "N_list": "int_list", "orders": "int_list",
                      "negative_control": bool}
CONVERGENCE_DEFAULTS = {**COMMON_DEFAULTS, **CURVE_DEFAULTS, "kind": "ellipse", "N_list": [128, 256, 512, 1024],
                        "orders": [2, 4], "negative_control": False}

RESIDUAL_FLOOR = 1e-12
LIMIT_TOLERANCE = 1e-5
DEFICIT_TOLERANCE = 1e-6


@dataclass
class ExperimentResult:
    exit_code: int = EXIT_OK
    artifacts: dict = field(default_factory=dict)
    payload: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def fail(self, message, code=EXIT_ASSERTION):
        if code == EXIT_FLOW_FAILURE:
            logger.error(message)
        else:
            logger.warning(message)
        self.failures.append(message)
        # a flow failure outranks the assertion failures it drags along
        if self.exit_code != EXIT_FLOW_FAILURE:
            self.exit_code = code


def space_form(cfg):
    try:
        return SpaceForm(cfg["K"], cfg["delta_pole"])
    except CurveflowError as e:
        raise ConfigError(str(e))


def output_dir(cfg):
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def curve_spec(cfg):
    try:
        kind = CurveKind(cfg["kind"])
    except ValueError:
        raise ConfigError(f"unknown curve kind {cfg['kind']!r}; choose from {', '.join(CurveKind.values)}")
    modes = cfg["modes"]
    cos, sin = cfg["cos"] or [0.0] * len(modes), cfg["sin"] or [0.0] * len(modes)
    if len(cos) != len(modes) or len(sin) != len(modes):
        raise ConfigError("cos and sin need one coefficient per entry of modes")
    return CurveSpec(
        kind=kind,
        r0=cfg["r0"],
        cos_modes=dict(zip(modes, cos)),
        sin_modes=dict(zip(modes, sin)),
        a=cfg["a"],
        b=cfg["b"],
        seed=cfg["seed"],
    )


def initial_curve(cfg):
    sf = space_form(cfg)
    try:
        if cfg.get("curve"):
            c = RadialCurve.from_csv(cfg["curve"], cfg["stencil_order"], cfg["delta_pole"])
            return c, {"curve": cfg["curve"]}
        spec = curve_spec(cfg)
        return generate(spec, sf, cfg["N"], cfg["stencil_order"]), spec.describe()
    except CurveflowError as e:
        raise ConfigError(str(e))


def flow_config(cfg):
    try:
        return FlowConfig(
            sigma=cfg["sigma"],
            t_end=cfg["t_end"],
            eps_stationary=cfg["eps_stationary"],
            report_stride=cfg.get("report_stride", 100),
            snapshot_stride=cfg.get("snapshot_stride", 1),
            dt_max=cfg.get("dt_max", 0.01),
            refine_on_failure=cfg.get("refine_on_failure", False),
            eps_convex=cfg["eps_convex"],
        )
    except CurveflowError as e:
        raise ConfigError(str(e))


def speed_law(name):
    try:
        return SpeedLaw(name)
    except ValueError:
        raise ConfigError(f"unknown speed law {name!r}; choose from {', '.join(SpeedLaw.values)}")


def check_limit(trace, result):
    """A converged constrained run must end on the circle of its initial length."""
    limit_error = trace.limit_error()
    if limit_error > LIMIT_TOLERANCE:
        result.fail(f"limit circle missed: max |rho - rho_inf| = {limit_error:.3e} > {LIMIT_TOLERANCE:g}")
    last = trace.reports[-1]
    if last.deficit > DEFICIT_TOLERANCE * last.L ** 2:
        result.fail(f"final isoperimetric deficit {last.deficit:.3e} exceeds {DEFICIT_TOLERANCE:g} L^2")


def cmd_simulate(cfg) -> ExperimentResult:
    result = ExperimentResult()
    out = output_dir(cfg)
    c0, curve_meta = initial_curve(cfg)
    law = speed_law(cfg["law"])
    config = flow_config(cfg)
    logger.info("simulating %s from %r", law.label, c0)
    try:
        trace = run(c0, law, config)
    except NotConvexError as e:
        raise ConfigError(f"initial curve rejected: {e}")
    summary = {**trace.summary(), "curve": curve_meta}
    result.artifacts.update(exports.write_trace(out, trace, summary))
    if cfg["svg"]:
        result.artifacts["svg"] = plots.trace_overlay(out / "overlay.svg", trace)
    if trace.failed:
        result.fail(f"flow stopped with status {trace.status.label}", EXIT_FLOW_FAILURE)
    for v in trace.violations:
        result.fail(f"monitor {v.name} violated at t={v.time:.6g} by {v.magnitude:.3e}")
    if law is SpeedLaw.CONSTRAINED_ICF and trace.status is FlowStatus.CONVERGED:
        check_limit(trace, result)
    result.payload = summary
    return result


def cmd_report(cfg) -> ExperimentResult:
    result = ExperimentResult()
    out = output_dir(cfg)
    c, curve_meta = initial_curve(cfg)
    report = geometry_report(c, cfg["eps_convex"])
    result.payload = {"curve": curve_meta, "report": report.to_dict()}
    result.artifacts["report"] = exports.write_json(out / "report.json", report.to_dict())
    return result


MARGINS = ("weighted_margin", "hk_gap", "corollary_margin", "nonconvex_margin")


def _sweep_item(args):
    K, N, seed, r0, convex, stencil_order, delta_pole, eps_convex = args
    c, spec = sample_random(SpaceForm(K, delta_pole), N, seed, r0, convex, stencil_order)
    return geometry_report(c, eps_convex), spec


def cmd_sweep(cfg) -> ExperimentResult:
    result = ExperimentResult()
    out = output_dir(cfg)
    sf = space_form(cfg)
    convex = not cfg["nonconvex"]
    if not convex and sf.K != -1:
        raise ConfigError("the non-convex sweep is defined in the hyperbolic plane only (K=-1)")
    n = cfg["n"]
    if n < 0:
        raise ConfigError("n must be non-negative")
    jobs = [(sf.K, cfg["N"], derive_seed(cfg["seed"], i), cfg["r0"], convex, cfg["stencil_order"],
             cfg["delta_pole"], cfg["eps_convex"]) for i in range(n)]
    try:
        if cfg["workers"] > 1 and n > 1:
            with ProcessPoolExecutor(max_workers=cfg["workers"]) as pool:
                items = list(pool.map(_sweep_item, jobs))
        else:
            items = [_sweep_item(job) for job in jobs]
    except CurveflowError as e:
        raise ConfigError(str(e))
    reports = [report for report, _ in items]

    checked = MARGINS if convex else ("nonconvex_margin",)
    minima, violations = {}, {}
    for name in checked:
        values = [(getattr(r, name), r.L) for r in reports if getattr(r, name) is not None]
        minima[name] = min((v for v, _ in values), default=None)
        violations[name] = sum(1 for v, L in values if v < -eps_quad(L))
    result.artifacts["reports"] = exports.write_reports_csv(
        out / "sweep.csv", reports, {"index": list(range(n)), "seed": [job[2] for job in jobs]}
    )
    aggregate = {
        "n": n,
        "K": sf.K,
        "N": cfg["N"],
        "seed": cfg["seed"],
        "convex": convex,
        "sampler": {
            "generator": "splitmix64",
            "modes": "1..8" if convex else "2..8",
            "coefficient_bound": "0.3/m^3" if convex else "0.6/m^1.5",
            "r0": cfg["r0"],
        },
        "min_margins": minima,
        "violations": violations,
    }
    for name, count in violations.items():
        if count:
            result.fail(f"{count} sampled curves violate {name}")
    result.payload = aggregate
    result.artifacts["aggregate"] = exports.write_json(out / "sweep.json", aggregate)
    return result


def perturbed_circle(sf, r0, eps, m, N, stencil_order=4):
    theta = 2 * math.pi / N * np.arange(N)
    return RadialCurve(sf, r0 + eps * np.cos(m * theta), stencil_order)


def counterexample_certificate(sf, r0, eps, m, N, stencil_order=4):
    """Delta and its ingredients for rho = r0 + eps cos(m theta)."""
    c = perturbed_circle(sf, r0, eps, m, N, stencil_order)
    if not c.is_strictly_convex().convex:
        raise NotConvexError(f"perturbed circle r0={r0}, eps={eps}, m={m} is not strictly convex")
    y0 = gp_argmax(c)
    L = c.length()
    return {
        "y0": [float(v) for v in y0],
        "F": gp_functional(c, y0),
        "bound": 2 * math.pi - L * L / (2 * math.pi),
        "gap": gp_counterexample_gap(c),
        "L": L,
        "N": N,
    }


def cmd_counterexample(cfg) -> ExperimentResult:
    result = ExperimentResult()
    out = output_dir(cfg)
    sf = space_form(cfg)
    if sf.K != 1:
        raise ConfigError("the counterexample lives on the hemisphere (K=+1)")
    r0, eps, m, N = cfg["r0"], cfg["eps"], cfg["m"], cfg["N"]
    try:
        certificate = counterexample_certificate(sf, r0, eps, m, N, cfg["stencil_order"])
        fine = counterexample_certificate(sf, r0, eps, m, 2 * N, cfg["stencil_order"])
        gap = certificate["gap"]
        relative_change = abs(fine["gap"] - gap) / abs(gap) if gap else None
        certificate.update({"r0": r0, "eps": eps, "m": m})
        certificate["refinement_check"] = {"N": 2 * N, "gap": fine["gap"], "relative_change": relative_change}
        if eps > 0:
            scaled = {e: counterexample_certificate(sf, r0, e, m, N, cfg["stencil_order"])["gap"]
                      for e in (eps / 4, eps / 2, eps)}
            ratios = [scaled[eps / 4] / scaled[eps / 2], scaled[eps / 2] / scaled[eps]]
            exponent = np.polyfit(np.log(list(scaled)), np.log(list(scaled.values())), 1)[0]
            certificate["scaling_check"] = {
                "eps": list(scaled),
                "gap": list(scaled.values()),
                "ratios": ratios,
                "exponent": float(exponent),
            }
    except CurveflowError as e:
        raise ConfigError(str(e))

    if eps == 0:
        if abs(gap) > 1e-8:
            result.fail(f"circle gap {gap:.3e} should vanish")
    else:
        if not gap > 0:
            result.fail(f"gap {gap:.3e} is not positive; no counterexample")
        if relative_change is None or relative_change > 0.01:
            result.fail(f"gap changes by {relative_change} under refinement to N={2 * N}")
        for ratio in certificate["scaling_check"]["ratios"]:
            if abs(ratio - 0.25) > 0.25 * 0.2:
                result.fail(f"gap ratio {ratio:.4f} under halving eps is not quadratic")
    certificate["certified"] = not result.failures and eps > 0
    result.payload = certificate
    result.artifacts["certificate"] = exports.write_json(out / "certificate.json", certificate)
    return result


def cmd_rate_study(cfg) -> ExperimentResult:
    result = ExperimentResult()
    out = output_dir(cfg)
    sf = space_form(cfg)
    spec = CurveSpec(CurveKind.FOURIER, cfg["r0"], {cfg["m"]: cfg["eps"]}, {})
    try:
        c0 = generate(spec, sf, cfg["N"], cfg["stencil_order"])
    except CurveflowError as e:
        raise ConfigError(str(e))
    config = flow_config({**cfg, "snapshot_stride": 1})
    trace = run(c0, SpeedLaw.CONSTRAINED_ICF, config)
    if trace.failed:
        result.fail(f"flow stopped with status {trace.status.label}", EXIT_FLOW_FAILURE)
        result.payload = trace.summary()
        exports.write_json(out / "rate.json", result.payload)
        return result
    try:
        fit = decay_rate(trace, cfg["m"])
    except CurveflowError as e:
        result.fail(str(e))
        result.payload = trace.summary()
        exports.write_json(out / "rate.json", result.payload)
        return result
    payload = {**fit.to_dict(), "K": sf.K, "N": cfg["N"], "status": trace.status.value}
    if fit.relative_error > cfg["tolerance"]:
        result.fail(f"measured rate {fit.measured_rate:.5g} is {fit.relative_error:.1%} off {fit.predicted_rate:.5g}")
    if not fit.l2_dominates:
        logger.warning("L2 decay rate %.4g is below the bound %.4g", fit.l2_rate, fit.l2_bound)
    result.artifacts["amplitudes"] = exports.write_csv(
        out / "amplitudes.csv",
        ["t", "amplitude", "log_amplitude"],
        [(t, a, math.log(a) if a > 0 else None) for t, a in zip(fit.times, fit.amplitudes)],
    )
    result.payload = payload
    result.artifacts["rate"] = exports.write_json(out / "rate.json", payload)
    return result


def kink_curve(sf, r0, N, stencil_order):
    theta = 2 * math.pi / N * np.arange(N)
    return RadialCurve(sf, r0 * (1 + 0.2 * np.abs(np.cos(theta))), stencil_order)


def observed_orders(Ns, residuals):
    orders = []
    for (n1, r1), (n2, r2) in zip(zip(Ns, residuals), zip(Ns[1:], residuals[1:])):
        if abs(r1) < RESIDUAL_FLOOR or abs(r2) < RESIDUAL_FLOOR:
            orders.append(None)
        else:
            orders.append(math.log(abs(r1) / abs(r2)) / math.log(n2 / n1))
    return orders


def cmd_convergence_study(cfg) -> ExperimentResult:
    result = ExperimentResult()
    out = output_dir(cfg)
    sf = space_form(cfg)
    Ns = sorted(cfg["N_list"])
    if len(Ns) < 2:
        raise ConfigError("N_list needs at least two grid sizes")
    table, rows = [], []
    for order in cfg["orders"]:
        residuals = {"minkowski": [], "gauss_bonnet": []}
        for N in Ns:
            if cfg["negative_control"]:
                c = kink_curve(sf, cfg["r0"], N, order)
            else:
                c, _ = initial_curve({**cfg, "N": N, "stencil_order": order})
            residuals["minkowski"].append(minkowski_residual(c))
            residuals["gauss_bonnet"].append(c.gauss_bonnet_residual())
            rows.append((order, N, residuals["minkowski"][-1], residuals["gauss_bonnet"][-1]))
        for name, values in residuals.items():
            orders = observed_orders(Ns, values)
            table.append({"stencil_order": order, "residual": name, "N": Ns, "values": values,
                          "observed_orders": orders})
            if cfg["negative_control"]:
                continue
            fitted = [p for p in orders if p is not None]
            if fitted and min(fitted) < order - 0.5:
                result.fail(f"{name} residual converges at order {min(fitted):.2f} < {order - 0.5} "
                            f"with the order-{order} stencil")
    result.artifacts["table"] = exports.write_csv(
        out / "convergence.csv", ["stencil_order", "N", "minkowski_residual", "gb_residual"], rows
    )
    result.payload = {"negative_control": cfg["negative_control"], "studies": table}
    result.artifacts["summary"] = exports.write_json(out / "convergence.json", result.payload)
    return result
