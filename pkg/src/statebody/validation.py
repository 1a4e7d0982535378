"""Distribution checks for the samplers, used by the validate-samplers command.

Two-sample tests pit the production route against an independent one (Wishart
spectrum vs Metropolis chain for boundary eigenvalues); scalar checks compare
sampled tail probabilities against closed-form values. Each check reports a
p-value or a sigma deviation plus a verdict.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from .hermitian import BipartiteShape
from .sampling import (
    RngStream,
    boundary_eigenvalues_metropolis,
    boundary_eigenvalues_wishart,
    sample_boundary_state_hs,
    sample_state_hs,
)

PURITY_TAIL_COMPLEX = 1.0 - 2.0 ** -1.5  # P(Tr rho^2 > 3/4), N = 2 complex
PURITY_TAIL_REAL = 0.5                   # same tail for the real ensemble


def _quantile_edges(pooled: np.ndarray, bins: int) -> np.ndarray:
    qs = np.linspace(0.0, 1.0, bins + 1)
    edges = np.quantile(pooled, qs)
    edges[0], edges[-1] = -np.inf, np.inf
    return np.unique(edges)


def two_sample_chi2(x: np.ndarray, y: np.ndarray, bins: int = 20) -> float:
    """p-value of a two-sample chi-squared test on quantile-balanced bins."""
    edges = _quantile_edges(np.concatenate([x, y]), bins)
    cx, _ = np.histogram(x, bins=edges)
    cy, _ = np.histogram(y, bins=edges)
    keep = (cx + cy) > 0
    table = np.vstack([cx[keep], cy[keep]])
    if table.shape[1] < 2:
        return 1.0
    return float(stats.chi2_contingency(table).pvalue)


def two_sample_chi2_2d(x: np.ndarray, y: np.ndarray, bins: int = 5) -> float:
    """Joint version for pairs of statistics, binned on marginal quantiles."""
    edges0 = _quantile_edges(np.concatenate([x[:, 0], y[:, 0]]), bins)
    edges1 = _quantile_edges(np.concatenate([x[:, 1], y[:, 1]]), bins)
    cx, _, _ = np.histogram2d(x[:, 0], x[:, 1], bins=(edges0, edges1))
    cy, _, _ = np.histogram2d(y[:, 0], y[:, 1], bins=(edges0, edges1))
    cx, cy = cx.ravel(), cy.ravel()
    keep = (cx + cy) >= 10  # merge-by-drop of near-empty corner cells
    table = np.vstack([cx[keep], cy[keep]])
    if table.shape[1] < 2:
        return 1.0
    return float(stats.chi2_contingency(table).pvalue)


def _purity(states: np.ndarray) -> np.ndarray:
    return np.sum(np.abs(states) ** 2, axis=(-2, -1))


def _bloch(states: np.ndarray) -> np.ndarray:
    x = 2.0 * states[:, 0, 1].real
    y = -2.0 * states[:, 0, 1].imag
    z = (states[:, 0, 0] - states[:, 1, 1]).real
    return np.stack([x, y, z], axis=1)


def sampler_validation(field: str, n: int, rng: RngStream,
                       p_threshold: float = 0.01) -> dict:
    """Run the full battery for one field; returns named check results.

    Each entry maps to a dict with a ``passed`` flag and either ``p_value``
    (distribution tests at the ``p_threshold`` level) or ``sigma`` (closed
    form comparisons, 4 sigma bands).
    """
    checks = {}

    # boundary eigenvalue law: production route vs independent Metropolis
    # chain; for the real field the production route IS the chain, so the
    # Wishart spectrum plays the independent role there
    lam3_w = boundary_eigenvalues_wishart(3, field, rng.child(10), n)
    lam3_m = boundary_eigenvalues_metropolis(3, field, rng.child(11), n)
    ks = stats.ks_2samp(lam3_w[:, -1], lam3_m[:, -1])
    checks["boundary_lmax_ks_n3"] = {
        "p_value": float(ks.pvalue), "passed": bool(ks.pvalue > p_threshold)}
    p3 = two_sample_chi2(lam3_w[:, -1], lam3_m[:, -1], bins=20)
    checks["boundary_joint_chi2_n3"] = {
        "p_value": p3, "passed": bool(p3 > p_threshold)}

    lam4_w = boundary_eigenvalues_wishart(4, field, rng.child(12), n)
    lam4_m = boundary_eigenvalues_metropolis(4, field, rng.child(13), n)
    p4 = two_sample_chi2_2d(lam4_w[:, 1:], lam4_m[:, 1:], bins=5)
    checks["boundary_joint_chi2_n4"] = {
        "p_value": p4, "passed": bool(p4 > p_threshold)}

    # interior purity tail against the closed-form value
    shape2 = BipartiteShape(1, 2, field)
    states = sample_state_hs(shape2, rng.child(14), n)
    target = PURITY_TAIL_COMPLEX if field == "complex" else PURITY_TAIL_REAL
    phat = float(np.mean(_purity(states) > 0.75))
    se = math.sqrt(max(phat * (1 - phat), 1e-12) / n)
    sig = abs(phat - target) / se
    checks["purity_tail_n2"] = {
        "value": phat, "target": target, "sigma": sig, "passed": bool(sig <= 4.0)}

    # boundary states of a qubit are pure and isotropic on the Bloch sphere
    # (a circle in the real case, where the y component vanishes)
    bstates, _ = sample_boundary_state_hs(shape2, rng.child(15), n)
    bloch = _bloch(bstates)
    radii = np.linalg.norm(bloch, axis=1)
    comps = (0, 1, 2) if field == "complex" else (0, 2)
    var = 1.0 / 3.0 if field == "complex" else 0.5
    worst = max(abs(float(np.mean(bloch[:, i]))) / math.sqrt(var / n)
                for i in comps)
    pure_ok = bool(np.max(np.abs(radii - 1.0)) <= 1e-10)
    checks["bloch_uniform_n2"] = {
        "sigma": worst, "radii_pure": pure_ok,
        "passed": bool(worst <= 4.0 and pure_ok)}

    checks["all_passed"] = all(
        c["passed"] for k, c in checks.items() if isinstance(c, dict))
    return checks
