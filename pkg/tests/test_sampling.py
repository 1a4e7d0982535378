"""Samplers: streams, Haar frames, interior/boundary measures, directions."""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from statebody import (
    BipartiteShape,
    BoundaryState,
    DensityMatrix,
    RngStream,
    boundary_eigenvalues_metropolis,
    boundary_eigenvalues_wishart,
    hs_inner,
    sample_boundary_state_hs,
    sample_direction,
    sample_haar_unitary,
    sample_state_hs,
)

UNITARY_ATOL = 1e-12
ZERO_EIG_TOL = 1e-12
KS_P_MIN = 1e-3


# ---------------------------------------------------------------------------
# streams


def test_stream_describe():
    assert RngStream(7).describe() == "philox4x64:7:0"
    assert RngStream(7, stream=3).describe() == "philox4x64:7:3"


def test_same_seed_same_bits():
    a = RngStream(123).generator().standard_normal(64)
    b = RngStream(123).generator().standard_normal(64)
    assert np.array_equal(a, b)


def test_children_are_distinct_and_reproducible():
    root = RngStream(99)
    draws = [root.child(i).generator().standard_normal(8) for i in range(100)]
    again = [root.child(i).generator().standard_normal(8) for i in range(100)]
    for d, e in zip(draws, again):
        assert np.array_equal(d, e)
    flat = np.array(draws)
    # no two child streams may collide
    assert len({tuple(row) for row in flat}) == 100


def test_child_differs_from_parent():
    root = RngStream(5)
    a = root.generator().standard_normal(16)
    b = root.child(0).generator().standard_normal(16)
    assert not np.allclose(a, b)


def test_stream_is_frozen():
    with pytest.raises(AttributeError):
        RngStream(1).seed = 2


# ---------------------------------------------------------------------------
# Haar frames


@pytest.mark.parametrize("field", ["complex", "real"])
def test_haar_unitarity(field):
    u = sample_haar_unitary(5, field, RngStream(11))
    assert np.allclose(u @ u.conj().T, np.eye(5), atol=UNITARY_ATOL)
    stack = sample_haar_unitary(3, field, RngStream(12), size=50)
    assert stack.shape == (50, 3, 3)
    prods = stack @ np.conj(np.swapaxes(stack, -1, -2))
    assert np.allclose(prods, np.eye(3), atol=UNITARY_ATOL)


def test_haar_first_moment():
    # E|U_00|^2 = 1/n for the invariant measure
    stack = sample_haar_unitary(3, "complex", RngStream(21), size=20000)
    m = np.mean(np.abs(stack[:, 0, 0]) ** 2)
    # |U_00|^2 is Beta(1, 2): sd of the mean is sqrt(1/18/20000)
    assert abs(m - 1 / 3) < 6 * math.sqrt(1 / 18 / 20000)


def test_haar_determinism():
    a = sample_haar_unitary(4, "complex", RngStream(8), size=3)
    b = sample_haar_unitary(4, "complex", RngStream(8), size=3)
    assert np.array_equal(a, b)


# ---------------------------------------------------------------------------
# interior states


@pytest.mark.parametrize("field", ["complex", "real"])
def test_interior_states_are_density_matrices(field):
    shape = BipartiteShape(1, 3, field)
    rho = sample_state_hs(shape, RngStream(2))
    assert isinstance(rho, DensityMatrix)
    stack = sample_state_hs(shape, RngStream(2), size=200)
    assert stack.shape == (200, 3, 3)
    assert np.allclose(np.trace(stack, axis1=-2, axis2=-1), 1.0, atol=1e-12)
    eigs = np.linalg.eigvalsh(stack)
    assert eigs.min() > -1e-12


def test_interior_pinned_sample():
    # frozen regression anchor for the counter-based stream layout
    rho = sample_state_hs(BipartiteShape(1, 3), RngStream(5))
    assert np.diag(rho.mat).real == pytest.approx(
        [0.19790234261912282, 0.4777206652342636, 0.3243769921466136], abs=1e-15
    )


def purity_tail_oracle(field: str) -> float:
    """P(Tr rho^2 > 3/4) for one qubit by quadrature over the eigenvalue law.

    The flat-measure eigenvalue density on [0, 1] is 3(2l-1)^2 in the complex
    case and 2|2l-1| in the real case; purity exceeds 3/4 iff |2l-1| > 1/sqrt2.
    """
    if field == "complex":
        dens = lambda l: 3 * (2 * l - 1) ** 2
    else:
        dens = lambda l: 2 * abs(2 * l - 1)
    hi = (1 + 1 / math.sqrt(2.0)) / 2
    val, err = integrate.quad(dens, hi, 1.0)
    assert err < 1e-12
    return 2 * val


def test_purity_tail_oracle_closed_forms():
    assert purity_tail_oracle("complex") == pytest.approx(1 - 2**-1.5, abs=1e-12)
    assert purity_tail_oracle("real") == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("field", ["complex", "real"])
def test_qubit_purity_tail(field):
    shape = BipartiteShape(1, 2, field)
    stack = sample_state_hs(shape, RngStream(31), size=40000)
    pur = np.einsum("sij,sji->s", stack, stack).real
    frac = np.mean(pur > 0.75)
    p = purity_tail_oracle(field)
    sd = math.sqrt(p * (1 - p) / 40000)
    assert abs(frac - p) < 4 * sd, f"{field}: {frac} vs {p} (sd {sd:.2g})"


# ---------------------------------------------------------------------------
# boundary states


@pytest.mark.parametrize("field", ["complex", "real"])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_boundary_eigenvalue_rows(field, n):
    lam = boundary_eigenvalues_wishart(n, field, RngStream(41), 300)
    assert lam.shape == (300, n - 1)
    assert np.all(np.diff(lam, axis=1) >= 0)
    assert np.allclose(lam.sum(axis=1), 1.0, atol=1e-12)
    assert lam.min() > 0


def test_boundary_eigenvalues_qubit_degenerate_case():
    lam = boundary_eigenvalues_metropolis(2, "complex", RngStream(1), 10)
    assert np.array_equal(lam, np.ones((10, 1)))


@pytest.mark.parametrize("field", ["complex", "real"])
@pytest.mark.parametrize("n", [3, 4])
def test_wishart_matches_metropolis(field, n):
    """Two independent routes to the boundary eigenvalue law must agree."""
    size = 4000
    lam_w = boundary_eigenvalues_wishart(n, field, RngStream(51), size)
    lam_m = boundary_eigenvalues_metropolis(n, field, RngStream(52), size)
    for col in range(n - 1):
        ks = stats.ks_2samp(lam_w[:, col], lam_m[:, col])
        assert ks.pvalue > KS_P_MIN, f"{field} n={n} col={col}: p={ks.pvalue:.3g}"


@pytest.mark.parametrize("field", ["complex", "real"])
def test_boundary_states_sit_on_the_boundary(field):
    shape = BipartiteShape(1, 4, field)
    out = sample_boundary_state_hs(shape, RngStream(61))
    assert isinstance(out, BoundaryState)
    states, psi = sample_boundary_state_hs(shape, RngStream(61), size=300)
    assert states.shape == (300, 4, 4)
    assert np.allclose(np.trace(states, axis1=-2, axis2=-1), 1.0, atol=1e-12)
    eigs = np.linalg.eigvalsh(states)
    assert np.max(np.abs(eigs[:, 0])) < ZERO_EIG_TOL
    assert eigs[:, 1].min() > 0
    # psi spans the kernel
    rp = np.einsum("sij,sj->si", states, psi)
    assert np.max(np.abs(rp)) < 1e-10
    assert np.allclose(np.sum(np.abs(psi) ** 2, axis=1), 1.0, atol=1e-12)


def test_boundary_pinned_sample():
    states, _ = sample_boundary_state_hs(BipartiteShape(1, 3), RngStream(5), size=2)
    eigs = np.linalg.eigvalsh(states[0])
    assert eigs == pytest.approx(
        [0.0, 0.1648162278960816, 0.8351837721039179], abs=1e-13
    )


def test_boundary_determinism():
    a, pa = sample_boundary_state_hs(BipartiteShape(2, 2), RngStream(3), size=50)
    b, pb = sample_boundary_state_hs(BipartiteShape(2, 2), RngStream(3), size=50)
    assert np.array_equal(a, b)
    assert np.array_equal(pa, pb)


# ---------------------------------------------------------------------------
# directions


@pytest.mark.parametrize("field", ["complex", "real"])
def test_directions_live_on_the_traceless_sphere(field):
    shape = BipartiteShape(2, 2, field)
    om = sample_direction(shape, RngStream(71))
    assert abs(np.trace(om.mat)) < 1e-12
    stack = sample_direction(shape, RngStream(71), size=500)
    assert np.allclose(np.trace(stack, axis1=-2, axis2=-1), 0.0, atol=1e-12)
    norms = np.sqrt(np.sum(np.abs(stack) ** 2, axis=(-2, -1)))
    assert np.allclose(norms, 1.0, atol=1e-12)
    assert np.allclose(stack, np.conj(np.swapaxes(stack, -1, -2)), atol=1e-12)


@pytest.mark.parametrize("field", ["complex", "real"])
def test_direction_isotropy(field):
    """Projections on any fixed axis of the sphere have variance 1/D."""
    shape = BipartiteShape(1, 3, field)
    d = shape.dim_body
    stack = sample_direction(shape, RngStream(81), size=20000)
    probes = [np.diag([1.0, -1.0, 0.0]) / np.sqrt(2.0)]
    off = np.zeros((3, 3), dtype=complex)
    off[0, 1] = off[1, 0] = 1 / np.sqrt(2.0)
    probes.append(off)
    for b in probes:
        proj = np.einsum("sij,ji->s", stack, np.conj(b).T).real
        assert abs(proj.mean()) < 6 / math.sqrt(d * 20000)
        assert abs(proj.var() - 1 / d) < 6 * (1 / d) * math.sqrt(2 / 20000)


def test_direction_pinned_sample():
    om = sample_direction(BipartiteShape(2, 2), RngStream(9))
    assert om.mat[0, 0] == pytest.approx(0.07555542490312417 + 0j, abs=1e-15)
