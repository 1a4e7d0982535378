"""Monte Carlo estimators: volumes, areas, gamma, omega, certificates."""

import dataclasses
import math

import numpy as np
import pytest

from statebody import (
    BipartiteShape,
    BodySpec,
    Estimate,
    InsufficientSamplesError,
    RngStream,
    corner_probe,
    cross_validate_area,
    estimate_omega,
    estimate_p_boundary,
    estimate_p_interior,
    height_certificate,
    inscribed_radius,
    mc_area,
    mc_boundary_ppt_fraction,
    mc_gamma,
    mc_volume,
    sphere_area,
)

QUBIT = BodySpec("full", BipartiteShape(1, 2))
SIGMA_LOOSE = 5.0


def test_sphere_area_closed_forms():
    assert sphere_area(1) == pytest.approx(2.0)
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    assert sphere_area(4) == pytest.approx(2 * math.pi**2)
    with pytest.raises(ValueError):
        sphere_area(0)


def test_estimate_is_frozen():
    est = Estimate(1.0, 0.1, 10, "philox4x64:1:0", "x")
    with pytest.raises(dataclasses.FrozenInstanceError):
        est.value = 2.0


# ---------------------------------------------------------------------------
# the qubit body is a ball: every estimator is exact there


def test_qubit_volume_is_exact():
    est = mc_volume(QUBIT, 20000, RngStream(77))
    assert est.value == pytest.approx(math.pi * math.sqrt(2.0) / 3, abs=1e-12)
    assert 0 < est.stderr < 1e-10
    assert est.estimator_id == "mc_volume[full:1x2 complex]"
    assert est.n_samples == 20000


def test_qubit_area_is_exact():
    est = mc_area(QUBIT, 20000, RngStream(78))
    assert est.value == pytest.approx(2 * math.pi, abs=1e-11)
    assert est.stderr > 0


def test_qubit_gamma_is_exact():
    est = mc_gamma(QUBIT, 20000, RngStream(79))
    assert est.value == pytest.approx(3.0, abs=1e-11)


@pytest.mark.parametrize("field,target", [("complex", 8), ("real", 5)])
def test_qutrit_gamma(field, target):
    body = BodySpec("full", BipartiteShape(1, 3, field))
    est = mc_gamma(body, 200_000, RngStream(101))
    assert est.stderr > 0
    assert abs(est.value - target) < SIGMA_LOOSE * est.stderr
    # the ratio estimator on a constant-height body is far tighter than the
    # naive quotient of two independent runs
    assert est.stderr < 1e-6


def test_gamma_of_ppt_body():
    body = BodySpec("ppt", BipartiteShape(2, 2))
    est = mc_gamma(body, 100_000, RngStream(103))
    assert abs(est.value - 15) < SIGMA_LOOSE * max(est.stderr, 1e-9)


def test_volume_area_determinism_and_shards():
    a = mc_volume(QUBIT, 9999, RngStream(5))
    b = mc_volume(QUBIT, 9999, RngStream(5))
    assert a.value == b.value and a.stderr == b.stderr
    c = mc_volume(QUBIT, 9999, RngStream(5), shards=3)
    d = mc_volume(QUBIT, 9999, RngStream(5), shards=3)
    assert c.value == d.value
    # different shard layout draws a different stream
    assert c.value != a.value


def test_estimator_rejects_bad_n():
    with pytest.raises(ValueError):
        mc_volume(QUBIT, 0, RngStream(1))
    with pytest.raises(ValueError):
        mc_gamma(QUBIT, -5, RngStream(1))


def test_area_raises_when_everything_is_nongeneric(monkeypatch):
    monkeypatch.setattr("statebody.geometry.GAP_TOL", 10.0)
    with pytest.raises(InsufficientSamplesError):
        mc_area(QUBIT, 500, RngStream(2))


# ---------------------------------------------------------------------------
# height certificates


@pytest.mark.parametrize("body", [
    BodySpec("full", BipartiteShape(1, 3)),
    BodySpec("full", BipartiteShape(1, 3, "real")),
    BodySpec("ppt", BipartiteShape(2, 2)),
])
def test_height_certificate_passes(body):
    cert = height_certificate(body, 5000, RngStream(111))
    assert cert.passed
    assert cert.max_abs_deviation <= cert.tol
    assert cert.insphere_radius == pytest.approx(inscribed_radius(body.shape.n))
    assert cert.n_nongeneric < 5
    again = height_certificate(body, 5000, RngStream(111))
    assert again.max_abs_deviation == cert.max_abs_deviation


# ---------------------------------------------------------------------------
# PPT probabilities and omega


def test_p_interior_trivial_for_unipartite():
    # partial transpose over a trivial first factor preserves the spectrum
    est = estimate_p_interior(BipartiteShape(1, 3), 2000, RngStream(7))
    assert est.value == 1.0
    assert est.stderr == pytest.approx(1 / 2000)


def test_p_interior_pinned_reference():
    est = estimate_p_interior(BipartiteShape(2, 2), 100_000, RngStream(20240901))
    assert est.value == pytest.approx(0.24372, abs=0)
    assert est.stderr == pytest.approx(0.0013576470881639308, abs=1e-18)
    assert est.estimator_id == "p_interior[2x2 complex]"


def test_omega_report():
    shape = BipartiteShape(2, 2)
    rep = estimate_omega(shape, 20000, RngStream(42))
    assert rep.shape == shape
    assert 0 < rep.p_boundary.value < rep.p_interior.value < 1
    assert abs(rep.omega - 2.0) < SIGMA_LOOSE * rep.stderr
    again = estimate_omega(shape, 20000, RngStream(42))
    assert again.omega == rep.omega and again.stderr == rep.stderr


def test_boundary_fraction_two_routes_agree():
    """Hit counting on boundary samples vs the radial-ratio route."""
    shape = BipartiteShape(2, 2)
    hits = estimate_p_boundary(shape, 30000, RngStream(55))
    radial = mc_boundary_ppt_fraction(shape, 30000, RngStream(56))
    pooled = math.hypot(hits.stderr, radial.stderr)
    assert abs(hits.value - radial.value) < SIGMA_LOOSE * pooled


def test_cross_validate_area():
    check = cross_validate_area(BipartiteShape(2, 2), 30000, RngStream(66))
    assert abs(check.discrepancy_sigma) < SIGMA_LOOSE
    assert check.radial.value > 0 and check.doubled.value > 0


# ---------------------------------------------------------------------------
# corner probe


def test_corner_probe_shrinks_linearly():
    res = corner_probe(BipartiteShape(2, 2), 40000, (1e-1, 1e-2, 1e-3), RngStream(9))
    fracs = [row[1] for row in res.rows]
    assert fracs == sorted(fracs, reverse=True)
    # the near-corner fraction scales like delta, so each decade drops the
    # fraction by roughly ten
    assert fracs[2] / fracs[1] < 0.2
    assert res.n_samples == 40000


def test_corner_probe_validates_deltas():
    shape = BipartiteShape(2, 2)
    with pytest.raises(ValueError):
        corner_probe(shape, 1000, (1e-2, 1e-1), RngStream(1))  # not decreasing
    with pytest.raises(ValueError):
        corner_probe(shape, 1000, (1e-1, -1e-2), RngStream(1))  # negative
