"""Monte Carlo estimators over the state body and its PPT section.

Volume and area come from radial integrals over uniform directions omega:

    V = S_{D-1}/D * E[r(omega)^D]
    A = S_{D-1}   * E[r(omega)^{D-1} / <omega, n(omega)>]

with D the body dimension and n(omega) the outward unit normal at the contact
point. Powers r^D are formed in the log domain, batch partial sums use
pairwise summation and shard merges happen in a fixed order, so estimates are
deterministic functions of (config, seed, shard count). Every stderr carries a
relative floating-point resolution floor: degenerate cases (the N = 2 body is
a round ball, and paired area/volume samples of a constant-height body differ
only by eigensolver jitter) would otherwise report a noise-level stderr and
turn acceptance bands into rounding lotteries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    BodySpec,
    _contact_batch,
    _radial_batch,
    analytic_area_volume_ratio,
    inscribed_radius,
)
from .hermitian import BipartiteShape, hermitian_part, partial_transpose
from .sampling import RngStream, sample_boundary_state_hs, sample_direction, sample_state_hs

BATCH = 1 << 16
STDERR_REL_FLOOR = 1e-12
PPT_TOL = 1e-12
NONGENERIC_WARN_FRACTION = 1e-3


class InsufficientSamplesError(RuntimeError):
    """A ratio denominator collected zero hits; more samples are needed."""


@dataclass(frozen=True)
class Estimate:
    """A Monte Carlo estimate with its sampling provenance."""

    value: float
    stderr: float
    n_samples: int
    seed: str
    estimator_id: str


@dataclass(frozen=True)
class OmegaReport:
    """PPT probabilities in the interior and on the boundary and their ratio."""

    shape: BipartiteShape
    p_interior: Estimate
    p_boundary: Estimate
    omega: float
    stderr: float


@dataclass(frozen=True)
class CornerProbeResult:
    """Fractions of boundary samples within delta of the corner set."""

    shape: BipartiteShape
    n_samples: int
    seed: str
    rows: tuple  # of (delta, fraction, stderr)


@dataclass(frozen=True)
class AreaCrossCheck:
    """PPT boundary area measured along two independent routes."""

    shape: BipartiteShape
    radial: Estimate
    doubled: Estimate
    discrepancy_sigma: float


@dataclass(frozen=True)
class HeightCertificate:
    """Sampled constant-height certificate for one body."""

    body: str
    n_samples: int
    n_nongeneric: int
    max_abs_deviation: float
    insphere_radius: float
    tol: float
    seed: str

    @property
    def passed(self) -> bool:
        frac = self.n_nongeneric / max(self.n_samples, 1)
        return self.max_abs_deviation <= self.tol and frac < NONGENERIC_WARN_FRACTION


def sphere_area(d: int) -> float:
    """Surface area 2 pi^{d/2} / Gamma(d/2) of the unit sphere in R^d."""
    if d < 1:
        raise ValueError(f"need d >= 1, got {d}")
    return math.exp(math.log(2.0) + 0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d))


def _check_n(n: int):
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise ValueError(f"n_samples must be a positive integer, got {n!r}")


def _shard_sizes(n: int, shards: int):
    if not (isinstance(shards, (int, np.integer)) and shards >= 1):
        raise ValueError(f"shards must be a positive integer, got {shards!r}")
    base, extra = divmod(n, shards)
    return [base + (1 if k < extra else 0) for k in range(shards)]


def _chunks(n: int):
    start = 0
    while start < n:
        yield min(BATCH, n - start)
        start += BATCH


def _floor_stderr(value: float, stderr: float) -> float:
    return float(max(stderr, abs(value) * STDERR_REL_FLOOR))


def _mean_estimate(x: np.ndarray, scale: float) -> tuple[float, float]:
    value = scale * float(np.mean(x))
    stderr = abs(scale) * float(np.std(x, ddof=1)) / math.sqrt(len(x))
    return value, _floor_stderr(value, stderr)


def _ratio_estimate(num: np.ndarray, den: np.ndarray, scale: float) -> tuple[float, float]:
    """Delta-method estimate of scale * mean(num)/mean(den) on paired samples.

    The residual form num - R*den avoids the catastrophic cancellation the
    textbook variance expansion suffers when the pairs are near-proportional.
    """
    nm, dm = float(np.mean(num)), float(np.mean(den))
    ratio = nm / dm
    resid = num - ratio * den
    var = float(np.mean(resid * resid)) / (len(num) * dm * dm)
    value = scale * ratio
    stderr = abs(scale) * math.sqrt(max(var, 0.0))
    return value, _floor_stderr(value, stderr)


def _binomial_estimate(hits: int, n: int) -> tuple[float, float]:
    p = hits / n
    if hits == 0 or hits == n:
        # rule-of-three scale keeps the stderr positive at the extremes
        return p, 1.0 / n
    return p, math.sqrt(p * (1.0 - p) / n)


def _collect_radial(body: BodySpec, n: int, rng: RngStream, shards: int,
                    want_heights: bool):
    """Per-sample radial data: log r, support heights, generic mask.

    Chunked so matrix stacks never exceed the batch size; only scalar arrays
    are retained. Shards and chunks each consume their own child stream and
    results concatenate in fixed index order.
    """
    logr, heights, generic = [], [], []
    for k, n_k in enumerate(_shard_sizes(n, shards)):
        stream = rng.child(k) if shards > 1 else rng
        for j, count in enumerate(_chunks(n_k)):
            omegas = sample_direction(body.shape, stream.child(j), count)
            if want_heights:
                _, _, h, data, nong = _contact_batch(body, omegas)
                heights.append(h)
                generic.append(~nong)
            else:
                data = _radial_batch(body, omegas, want_vectors=False)
            logr.append(np.log(data["r"]))
    out_logr = np.concatenate(logr)
    out_h = np.concatenate(heights) if want_heights else None
    out_gen = np.concatenate(generic) if want_heights else None
    return out_logr, out_h, out_gen


def mc_volume(body: BodySpec, n: int, rng: RngStream, shards: int = 1) -> Estimate:
    """Volume of the body by the radial integral over uniform directions."""
    _check_n(n)
    d = body.shape.dim_body
    logr, _, _ = _collect_radial(body, n, rng, shards, want_heights=False)
    vals = np.exp(d * logr)
    value, stderr = _mean_estimate(vals, sphere_area(d) / d)
    return Estimate(value, stderr, n, rng.describe(), f"mc_volume[{body}]")


def mc_area(body: BodySpec, n: int, rng: RngStream, shards: int = 1) -> Estimate:
    """Boundary area of the body by the radial surface integral.

    Non-generic directions (no unique supporting hyperplane) are discarded;
    they form a measure-zero set, and the discarded fraction is checked
    against NONGENERIC_WARN_FRACTION.
    """
    _check_n(n)
    d = body.shape.dim_body
    logr, h, gen = _collect_radial(body, n, rng, shards, want_heights=True)
    n_gen = int(np.sum(gen))
    if n_gen == 0:
        raise InsufficientSamplesError("all sampled directions were non-generic")
    if (n - n_gen) / n >= NONGENERIC_WARN_FRACTION:
        raise InsufficientSamplesError(
            f"non-generic fraction {(n - n_gen) / n:.2e} too large; "
            "the body looks degenerate"
        )
    vals = np.exp(d * logr[gen]) / h[gen]
    value, stderr = _mean_estimate(vals, sphere_area(d))
    return Estimate(value, stderr, n_gen, rng.describe(), f"mc_area[{body}]")


def mc_gamma(body: BodySpec, n: int, rng: RngStream, shards: int = 1) -> Estimate:
    """The dimensionless ratio gamma = r_in * A / V on shared direction samples.

    A and V share the same radial samples, so gamma is a correlated ratio; the
    stderr comes from the paired delta method. For a constant-height body the
    estimate equals the body dimension up to eigensolver rounding.
    """
    _check_n(n)
    d = body.shape.dim_body
    r_in = inscribed_radius(body.shape.n)
    logr, h, gen = _collect_radial(body, n, rng, shards, want_heights=True)
    n_gen = int(np.sum(gen))
    if n_gen == 0:
        raise InsufficientSamplesError("all sampled directions were non-generic")
    v = np.exp(d * logr[gen])
    a = v / h[gen]
    value, stderr = _ratio_estimate(a, v, r_in * d)
    return Estimate(value, stderr, n_gen, rng.describe(), f"mc_gamma[{body}]")


def height_certificate(body: BodySpec, n: int, rng: RngStream,
                       tol: float = 1e-9) -> HeightCertificate:
    """Max deviation of sampled support heights from the insphere radius."""
    _check_n(n)
    r_in = inscribed_radius(body.shape.n)
    _, h, gen = _collect_radial(body, n, rng, 1, want_heights=True)
    devs = np.abs(h[gen] - r_in)
    return HeightCertificate(
        body=str(body),
        n_samples=n,
        n_nongeneric=int(n - np.sum(gen)),
        max_abs_deviation=float(np.max(devs)) if devs.size else float("nan"),
        insphere_radius=r_in,
        tol=tol,
        seed=rng.describe(),
    )


def _ppt_mask(states: np.ndarray, shape: BipartiteShape,
              tol: float = PPT_TOL) -> np.ndarray:
    pt = partial_transpose(hermitian_part(states), shape)
    w = np.linalg.eigvalsh(pt)
    return w[..., 0] >= -tol


def estimate_p_interior(shape: BipartiteShape, n: int, rng: RngStream,
                        shards: int = 1) -> Estimate:
    """PPT probability of Hilbert-Schmidt interior samples."""
    _check_n(n)
    hits = 0
    for k, n_k in enumerate(_shard_sizes(n, shards)):
        stream = rng.child(k) if shards > 1 else rng
        for j, count in enumerate(_chunks(n_k)):
            states = sample_state_hs(shape, stream.child(j), count)
            hits += int(np.sum(_ppt_mask(states, shape)))
    p, se = _binomial_estimate(hits, n)
    return Estimate(p, se, n, rng.describe(), f"p_interior[{shape}]")


def estimate_p_boundary(shape: BipartiteShape, n: int, rng: RngStream,
                        shards: int = 1) -> Estimate:
    """PPT probability of boundary samples under the surface measure."""
    _check_n(n)
    hits = 0
    for k, n_k in enumerate(_shard_sizes(n, shards)):
        stream = rng.child(k) if shards > 1 else rng
        for j, count in enumerate(_chunks(n_k)):
            states, _ = sample_boundary_state_hs(shape, stream.child(j), count)
            hits += int(np.sum(_ppt_mask(states, shape)))
    p, se = _binomial_estimate(hits, n)
    return Estimate(p, se, n, rng.describe(), f"p_boundary[{shape}]")


def estimate_omega(shape: BipartiteShape, n: int, rng: RngStream,
                   shards: int = 1) -> OmegaReport:
    """Omega = p_interior / p_boundary on independent streams.

    For any bipartite system this ratio is exactly two: the PPT body shares
    its volume with the reflected body and a corner set of measure zero splits
    the boundary area evenly.
    """
    p_v = estimate_p_interior(shape, n, rng.child(0), shards)
    p_a = estimate_p_boundary(shape, n, rng.child(1), shards)
    if p_a.value == 0.0:
        raise InsufficientSamplesError(
            f"no PPT boundary hits in {n} samples for {shape}; "
            "omega is undefined at this sample size"
        )
    omega = p_v.value / p_a.value
    rel = math.sqrt((p_v.stderr / p_v.value) ** 2 + (p_a.stderr / p_a.value) ** 2) \
        if p_v.value > 0 else float("inf")
    return OmegaReport(shape, p_v, p_a, omega, omega * rel)


def corner_probe(shape: BipartiteShape, n: int, deltas, rng: RngStream) -> CornerProbeResult:
    """Fractions of boundary samples with a partial-transpose eigenvalue
    within each delta of zero.

    The corner set of the PPT body's boundary has codimension one inside the
    boundary, so the fractions should scale linearly in delta.
    """
    _check_n(n)
    deltas = [float(x) for x in deltas]
    if any(x < 0 for x in deltas):
        raise ValueError(f"deltas must be nonnegative, got {deltas}")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError(f"deltas must be strictly decreasing, got {deltas}")
    counts = np.zeros(len(deltas), dtype=np.int64)
    for j, count in enumerate(_chunks(n)):
        states, _ = sample_boundary_state_hs(shape, rng.child(j), count)
        pt = partial_transpose(hermitian_part(states), shape)
        closest = np.min(np.abs(np.linalg.eigvalsh(pt)), axis=-1)
        for i, d in enumerate(deltas):
            counts[i] += int(np.sum(closest < d))
    rows = []
    for d, c in zip(deltas, counts):
        p, se = _binomial_estimate(int(c), n)
        rows.append((d, p, se))
    return CornerProbeResult(shape, n, rng.describe(), tuple(rows))


def mc_boundary_ppt_fraction(shape: BipartiteShape, n: int, rng: RngStream) -> Estimate:
    """PPT fraction of the full body's boundary via the radial area integral.

    Weighs each sampled direction by its surface element and tests the contact
    point for PPT; agrees with estimate_p_boundary without ever drawing a
    boundary sample, which makes it an independent check on the boundary
    sampler's eigenvalue density.
    """
    _check_n(n)
    body = BodySpec("full", shape)
    d = shape.dim_body
    w_parts, hit_parts = [], []
    for j, count in enumerate(_chunks(n)):
        omegas = sample_direction(shape, rng.child(j), count)
        points, _, h, data, nong = _contact_batch(body, omegas)
        gen = ~nong
        w = np.exp(d * np.log(data["r"][gen])) / h[gen]
        w_parts.append(w)
        hit_parts.append(_ppt_mask(points[gen], shape))
    w = np.concatenate(w_parts)
    hits = np.concatenate(hit_parts).astype(float)
    value, stderr = _ratio_estimate(w * hits, w, 1.0)
    return Estimate(value, stderr, len(w), rng.describe(),
                    f"boundary_ppt_fraction[{shape}]")


def cross_validate_area(shape: BipartiteShape, n: int, rng: RngStream) -> AreaCrossCheck:
    """PPT boundary area two ways: radial integral vs doubled hit count.

    Route one integrates the radial surface element over the PPT body. Route
    two doubles p_boundary times the total area (the boundary splits evenly
    between the body's own faces and reflected ones, the corner set being
    area-free), taking the total area from the closed-form area/volume ratio
    in the complex case and from the radial area integral in the real case.
    """
    _check_n(n)
    ppt_body = BodySpec("ppt", shape)
    full_body = BodySpec("full", shape)
    a_ppt = mc_area(ppt_body, n, rng.child(0))
    p_a = estimate_p_boundary(shape, n, rng.child(1))
    if shape.field == "complex":
        v_tot = mc_volume(full_body, n, rng.child(2))
        a_tot_value = v_tot.value * analytic_area_volume_ratio(shape.n)
        a_tot_rel = v_tot.stderr / v_tot.value
    else:
        a_tot = mc_area(full_body, n, rng.child(2))
        a_tot_value = a_tot.value
        a_tot_rel = a_tot.stderr / a_tot.value
    doubled_value = 2.0 * p_a.value * a_tot_value
    rel = math.sqrt((p_a.stderr / p_a.value) ** 2 + a_tot_rel ** 2)
    doubled = Estimate(doubled_value, _floor_stderr(doubled_value, doubled_value * rel),
                       n, rng.describe(), f"doubled_area[{shape}]")
    disc = abs(a_ppt.value - doubled.value) / math.sqrt(
        a_ppt.stderr ** 2 + doubled.stderr ** 2
    )
    return AreaCrossCheck(shape, a_ppt, doubled, disc)
