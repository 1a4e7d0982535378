"""Experiment dispatch: config in, persisted result record out.

Each experiment builds its estimate, compares it against its target band and
returns a :class:`ResultRecord`; ``write=True`` also persists the JSON record
and CSV row under the config's output path.
"""

from __future__ import annotations

import time

import numpy as np

from . import __version__
from .config import ExperimentConfig
from .estimators import (
    corner_probe,
    cross_validate_area,
    estimate_omega,
    height_certificate,
    mc_gamma,
)
from .geometry import BodySpec
from .hermitian import BipartiteShape
from .polytopes import (
    TangentBody,
    constant_height_check,
    cross_generators,
    cube_generators,
    polytope_gamma_mc,
    random_unit_generators,
    simplex_generators,
)
from .records import ResultRecord, write_record
from .sampling import RngStream
from .validation import sampler_validation


def _shape(config: ExperimentConfig) -> BipartiteShape:
    k, m = config.shape
    return BipartiteShape(k, m, config.field)


def _estimate_metrics(est) -> dict:
    return {"value": est.value, "stderr": est.stderr, "n_samples": est.n_samples,
            "seed": est.seed, "estimator_id": est.estimator_id}


def _run_omega(config: ExperimentConfig, rng: RngStream):
    rep = estimate_omega(_shape(config), config.n_samples, rng, config.shards)
    sigma = config.tolerance("sigma")
    dev = (rep.omega - 2.0) / rep.stderr
    metrics = {
        "p_interior": _estimate_metrics(rep.p_interior),
        "p_boundary": _estimate_metrics(rep.p_boundary),
        "omega": rep.omega,
        "omega_stderr": rep.stderr,
    }
    return metrics, rep.omega, rep.stderr, 2.0, dev, bool(abs(dev) <= sigma)


def _run_gamma(config: ExperimentConfig, rng: RngStream):
    shape = _shape(config)
    body = BodySpec(config.body, shape)
    est = mc_gamma(body, config.n_samples, rng, config.shards)
    target = float(shape.dim_body)
    sigma = config.tolerance("sigma")
    dev = (est.value - target) / est.stderr
    metrics = {"gamma": _estimate_metrics(est), "body": str(body),
               "dim_body": shape.dim_body}
    return metrics, est.value, est.stderr, target, dev, bool(abs(dev) <= sigma)


def _run_height_check(config: ExperimentConfig, rng: RngStream):
    shape = _shape(config)
    body = BodySpec(config.body, shape)
    cert = height_certificate(body, config.n_samples, rng,
                              tol=config.tolerance("height_tol"))
    metrics = {
        "body": cert.body,
        "max_abs_deviation": cert.max_abs_deviation,
        "insphere_radius": cert.insphere_radius,
        "n_nongeneric": cert.n_nongeneric,
        "nongeneric_fraction": cert.n_nongeneric / cert.n_samples,
        "tol": cert.tol,
    }
    return (metrics, cert.max_abs_deviation, None, 0.0, None, cert.passed)


def _run_corner_probe(config: ExperimentConfig, rng: RngStream):
    res = corner_probe(_shape(config), config.n_samples, config.deltas, rng)
    fracs = [row[1] for row in res.rows]
    monotone = all(a >= b for a, b in zip(fracs, fracs[1:]))
    ratio_max = config.tolerance("corner_ratio_max")
    if len(fracs) >= 2 and fracs[-2] > 0:
        last_ratio = fracs[-1] / fracs[-2]
        ratio_ok = last_ratio <= ratio_max
    else:
        last_ratio = float("nan")
        ratio_ok = False
    metrics = {
        "rows": [{"delta": d, "fraction": f, "stderr": s} for d, f, s in res.rows],
        "monotone": monotone,
        "last_ratio": last_ratio,
    }
    return (metrics, last_ratio, None, None, None, bool(monotone and ratio_ok))


def _run_area_crosscheck(config: ExperimentConfig, rng: RngStream):
    acc = cross_validate_area(_shape(config), config.n_samples, rng)
    sigma = config.tolerance("sigma")
    metrics = {
        "area_ppt_radial": _estimate_metrics(acc.radial),
        "area_ppt_doubled": _estimate_metrics(acc.doubled),
        "discrepancy_sigma": acc.discrepancy_sigma,
    }
    return (metrics, acc.discrepancy_sigma, None, 0.0, acc.discrepancy_sigma,
            bool(acc.discrepancy_sigma <= sigma))


def _build_polytope(config: ExperimentConfig, rng: RngStream) -> TangentBody:
    if config.generators is not None:
        return TangentBody(np.asarray(config.generators, dtype=float))
    builders = {
        "cube": lambda: cube_generators(config.dim),
        "cross": lambda: cross_generators(config.dim),
        "simplex": lambda: simplex_generators(config.dim),
        "random-unit": lambda: random_unit_generators(
            config.dim, config.n_generators, rng.child(999)),
    }
    return TangentBody(builders[config.preset]())


def _run_polytope_gamma(config: ExperimentConfig, rng: RngStream):
    body = _build_polytope(config, rng)
    est = polytope_gamma_mc(body, config.n_samples, rng)
    height = constant_height_check(body, min(config.n_samples, 20000), rng.child(7))
    target = config.target if config.target is not None else float(body.dim)
    sigma = config.tolerance("sigma")
    dev = (est.value - target) / est.stderr
    metrics = {
        "gamma": _estimate_metrics(est),
        "dim": body.dim,
        "n_generators": body.n_generators,
        "all_unit": body.all_unit,
        "height_max_deviation": height.max_deviation,
    }
    return metrics, est.value, est.stderr, target, dev, bool(abs(dev) <= sigma)


def _run_sampler_validate(config: ExperimentConfig, rng: RngStream):
    checks = sampler_validation(config.field, config.n_samples, rng,
                                p_threshold=config.tolerance("p_threshold"))
    p_values = [c["p_value"] for c in checks.values()
                if isinstance(c, dict) and "p_value" in c]
    metrics = dict(checks)
    return (metrics, min(p_values), None, None, None, bool(checks["all_passed"]))


_RUNNERS = {
    "omega": _run_omega,
    "gamma": _run_gamma,
    "height-check": _run_height_check,
    "corner-probe": _run_corner_probe,
    "area-crosscheck": _run_area_crosscheck,
    "polytope-gamma": _run_polytope_gamma,
    "sampler-validate": _run_sampler_validate,
}


def run_experiment(config: ExperimentConfig, write: bool = True) -> ResultRecord:
    """Run one experiment and (optionally) persist its record."""
    rng = RngStream(config.seed)
    t0 = time.perf_counter()
    metrics, value, stderr, target, sigma_dev, passed = _RUNNERS[config.experiment](
        config, rng)
    wall = time.perf_counter() - t0
    record = ResultRecord(
        experiment=config.experiment,
        config=config.canonical_dict(),
        config_hash=config.config_hash(),
        metrics=metrics,
        value=float(value),
        stderr=None if stderr is None else float(stderr),
        target=None if target is None else float(target),
        sigma_dev=None if sigma_dev is None else float(sigma_dev),
        passed=bool(passed),
        version=__version__,
        wall_time_s=wall,
    )
    if write:
        write_record(record, config.output_path)
    return record


def summary_line(record: ResultRecord) -> str:
    shape = record.config.get("shape")
    where = "x".join(str(s) for s in shape) if shape else record.config.get(
        "preset") or "-"
    bits = [record.experiment, where, record.config.get("field", ""),
            f"n={record.config['n_samples']}", f"seed={record.config['seed']}"]
    head = " ".join(str(b) for b in bits if b)
    if record.stderr is not None and record.target is not None:
        tail = (f"value={record.value:.6g} +- {record.stderr:.2g} "
                f"target={record.target:g} ({record.sigma_dev:+.2f} sigma)")
    elif record.target is not None:
        tail = f"value={record.value:.6g} target={record.target:g}"
    else:
        tail = f"value={record.value:.6g}"
    verdict = "PASS" if record.passed else "FAIL"
    return f"{head} -> {tail} {verdict}"
