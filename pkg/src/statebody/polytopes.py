"""Finite-dimensional laboratory for tangent-face geometry.

A :class:`TangentBody` is the polar of a finite generator set Y inside the
unit ball: X = {x : <x, y> <= 1 for all y in Y}. When every generator has unit
norm each exposed face is tangent to the unit sphere and the body has constant
height, so gamma = r * A / V equals the ambient dimension, mirroring the state
body without any quantum machinery. Shorter generators push their face outward
and break the equality exactly when that face is exposed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .estimators import (
    Estimate,
    _floor_stderr,
    _mean_estimate,
    _ratio_estimate,
    sphere_area,
)
from .sampling import RngStream

NORM_SLACK = 1e-12
TIE_TOL = 1e-12


class UnboundedBodyError(ValueError):
    """The generator hull does not contain the origin in its interior."""


class FaceTieError(RuntimeError):
    """Two generators bind the same direction; the face is not unique."""


class TangentBody:
    """Polar body of a finite set of generators with norms at most one."""

    __slots__ = ("generators", "dim", "_norms", "_all_unit")

    def __init__(self, generators, *, validate: bool = True):
        g = np.atleast_2d(np.asarray(generators, dtype=float))
        if g.ndim != 2 or g.shape[0] < 1:
            raise ValueError(f"generators must be a (m, dim) array, got {g.shape}")
        norms = np.linalg.norm(g, axis=1)
        if validate:
            worst = float(np.max(norms))
            if worst > 1.0 + NORM_SLACK:
                raise ValueError(
                    f"generator norm {worst:.12f} exceeds one; generators must "
                    "lie in the unit ball"
                )
            _check_origin_interior(g)
        g = g.copy()
        g.setflags(write=False)
        object.__setattr__(self, "generators", g)
        object.__setattr__(self, "dim", g.shape[1])
        object.__setattr__(self, "_norms", norms)
        object.__setattr__(self, "_all_unit", bool(np.max(np.abs(norms - 1.0)) <= NORM_SLACK))

    def __setattr__(self, name, value):
        raise AttributeError("TangentBody is immutable")

    @property
    def n_generators(self) -> int:
        return self.generators.shape[0]

    @property
    def all_unit(self) -> bool:
        """True when every generator touches the unit sphere."""
        return self._all_unit

    def __repr__(self):
        return f"TangentBody(dim={self.dim}, n_generators={self.n_generators})"


def _check_origin_interior(g: np.ndarray):
    """Reject generator sets whose polar body is unbounded.

    The polar is bounded iff the recession cone {d : Y d <= 0} is trivial;
    each coordinate direction is probed with a small LP and any nonzero
    solution is reported as the offending unbounded direction.
    """
    m, dim = g.shape
    bounds = [(-1.0, 1.0)] * dim
    for i in range(dim):
        for sign in (1.0, -1.0):
            c = np.zeros(dim)
            c[i] = -sign  # maximize sign * d_i
            res = linprog(c, A_ub=g, b_ub=np.zeros(m), bounds=bounds, method="highs")
            if res.status != 0:
                raise UnboundedBodyError(f"interiority LP failed: {res.message}")
            if -res.fun > 1e-9:
                d = res.x / np.linalg.norm(res.x)
                raise UnboundedBodyError(
                    "origin is not interior to the generator hull; the body is "
                    f"unbounded along direction {np.round(d, 6).tolist()}"
                )


@dataclass(frozen=True)
class PolytopeContact:
    """Binding face data along a direction."""

    point: np.ndarray
    normal: np.ndarray
    support_distance: float
    generator_index: int


def _support_products(body: TangentBody, direction: np.ndarray) -> np.ndarray:
    d = np.asarray(direction, dtype=float).reshape(-1)
    if d.size != body.dim:
        raise ValueError(f"direction length {d.size} != dim {body.dim}")
    nrm = np.linalg.norm(d)
    if not np.isfinite(nrm) or nrm < 1e-300:
        raise ValueError("direction must be a nonzero vector")
    return body.generators @ (d / nrm), d / nrm


def polar_radial(body: TangentBody, direction) -> float:
    """Distance from the origin to the boundary along ``direction``."""
    s, _ = _support_products(body, direction)
    smax = float(np.max(s))
    if smax <= 0.0:
        raise UnboundedBodyError(
            f"body is unbounded along direction {np.round(direction, 6).tolist()}"
        )
    return 1.0 / smax


def polar_contact(body: TangentBody, direction) -> PolytopeContact:
    """Binding generator, face normal and support distance along a direction.

    Raises :class:`FaceTieError` when two generators bind within TIE_TOL;
    those directions hit an edge, not a face.
    """
    s, unit = _support_products(body, direction)
    order = np.argsort(s)
    smax = float(s[order[-1]])
    if smax <= 0.0:
        raise UnboundedBodyError(
            f"body is unbounded along direction {np.round(direction, 6).tolist()}"
        )
    if len(s) > 1 and (smax - float(s[order[-2]])) <= TIE_TOL * max(smax, 1.0):
        raise FaceTieError(
            f"generators {int(order[-1])} and {int(order[-2])} tie along this "
            "direction; no unique face"
        )
    idx = int(order[-1])
    y = body.generators[idx]
    ynorm = float(np.linalg.norm(y))
    return PolytopeContact(
        point=unit / smax,
        normal=y / ynorm,
        support_distance=1.0 / ynorm,
        generator_index=idx,
    )


def intersect_bodies(a: TangentBody, b: TangentBody) -> TangentBody:
    """Intersection of two polar bodies: the polar of the generator union.

    Generators are deduplicated and canonically ordered, so the operation is
    commutative and associative at the generator-set level and the radial
    function of the result is exactly the minimum of the two inputs.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch {a.dim} vs {b.dim}")
    merged = np.unique(np.vstack([a.generators, b.generators]), axis=0)
    # parents were validated and a union only shrinks the body
    return TangentBody(merged, validate=False)


_SWEEP_BATCH = 1 << 13


def _radial_sweep(body: TangentBody, n: int, rng: RngStream):
    """Per-direction radial data: log r, support distance, tie mask.

    Chunked so the (batch, n_generators) product matrix stays small; chunk j
    draws from rng.child(j).
    """
    logr_parts, h_parts, ok_parts = [], [], []
    done, j = 0, 0
    while done < n:
        count = min(_SWEEP_BATCH, n - done)
        gen = rng.child(j).generator()
        dirs = gen.standard_normal((count, body.dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        s = dirs @ body.generators.T
        idx = np.argmax(s, axis=1)
        smax = s[np.arange(count), idx]
        if np.any(smax <= 0.0):
            bad = dirs[int(np.argmin(smax))]
            raise UnboundedBodyError(
                f"body is unbounded along direction {np.round(bad, 6).tolist()}"
            )
        if s.shape[1] > 1:
            s2 = np.partition(s, -2, axis=1)[:, -2]
        else:
            s2 = np.full(count, -np.inf)
        ties = (smax - s2) <= TIE_TOL * np.maximum(smax, 1.0)
        logr_parts.append(np.log(1.0 / smax))
        h_parts.append(1.0 / body._norms[idx])
        ok_parts.append(~ties)
        done += count
        j += 1
    return (np.concatenate(logr_parts), np.concatenate(h_parts),
            np.concatenate(ok_parts))


def polytope_gamma_mc(body: TangentBody, n: int, rng: RngStream) -> Estimate:
    """gamma = r_in * A / V by the same radial integrals used on state bodies.

    The insphere radius is exactly one for all-unit generator sets; otherwise
    it is taken as the smallest binding support distance seen in the sweep
    (an empirical estimate, noted in the estimator id).
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    d = body.dim
    logr, h, ok = _radial_sweep(body, n, rng)
    logr, h = logr[ok], h[ok]
    if logr.size == 0:
        raise FaceTieError("every sampled direction tied; degenerate body")
    v = np.exp(d * logr)
    a = v / h
    if body.all_unit:
        r_in, tag = 1.0, "insphere=unit"
    else:
        r_in, tag = float(np.min(h)), "insphere=empirical"
    value, stderr = _ratio_estimate(a, v, r_in * d)
    return Estimate(value, stderr, int(logr.size), rng.describe(),
                    f"polytope_gamma[dim={d},{tag}]")


def polytope_volume_mc(body: TangentBody, n: int, rng: RngStream) -> Estimate:
    """Volume by the radial integral; handy for calibrating small examples."""
    d = body.dim
    logr, _, _ = _radial_sweep(body, n, rng)
    value, stderr = _mean_estimate(np.exp(d * logr), sphere_area(d) / d)
    return Estimate(value, stderr, n, rng.describe(), f"polytope_volume[dim={d}]")


def polytope_area_mc(body: TangentBody, n: int, rng: RngStream) -> Estimate:
    """Boundary area by the radial surface integral."""
    d = body.dim
    logr, h, ok = _radial_sweep(body, n, rng)
    vals = np.exp(d * logr[ok]) / h[ok]
    value, stderr = _mean_estimate(vals, sphere_area(d))
    return Estimate(value, stderr, int(np.sum(ok)), rng.describe(),
                    f"polytope_area[dim={d}]")


@dataclass(frozen=True)
class PolytopeHeightReport:
    """Sampled constant-height verdict for a polar body."""

    max_deviation: float
    passed: bool
    tol: float
    n_samples: int
    n_ties: int


def constant_height_check(body: TangentBody, n: int, rng: RngStream,
                          tol: float = 1e-9) -> PolytopeHeightReport:
    """Max |support_distance - 1| over the faces met by a direction sweep."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    _, h, ok = _radial_sweep(body, n, rng)
    dev = float(np.max(np.abs(h[ok] - 1.0))) if np.any(ok) else float("nan")
    return PolytopeHeightReport(
        max_deviation=dev,
        passed=bool(dev <= tol),
        tol=tol,
        n_samples=n,
        n_ties=int(n - np.sum(ok)),
    )


def cube_generators(dim: int) -> np.ndarray:
    """Unit generators +-e_i; their polar is the cube [-1, 1]^dim."""
    eye = np.eye(dim)
    return np.vstack([eye, -eye])


def cross_generators(dim: int) -> np.ndarray:
    """Normalized cube vertices; their polar is a scaled cross-polytope."""
    if dim > 16:
        raise ValueError("2^dim generators; keep dim <= 16")
    corners = np.array(np.meshgrid(*([[-1.0, 1.0]] * dim))).reshape(dim, -1).T
    return corners / np.sqrt(dim)


def simplex_generators(dim: int) -> np.ndarray:
    """dim+1 unit vectors summing to zero; their polar is a regular simplex."""
    e = np.eye(dim + 1)
    center = np.full(dim + 1, 1.0 / (dim + 1))
    pts = e - center
    # orthonormal basis of the sum-zero hyperplane via QR of its projector
    q, _ = np.linalg.qr(pts.T)
    basis = q[:, :dim]
    g = pts @ basis
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def random_unit_generators(dim: int, count: int, rng: RngStream) -> np.ndarray:
    """Uniform unit generators; the polar is constant-height by construction.

    Retries degenerate draws are not needed: with count >= dim + 1 the origin
    is interior with overwhelming probability, and construction validates.
    """
    gen = rng.generator()
    g = gen.standard_normal((count, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)
