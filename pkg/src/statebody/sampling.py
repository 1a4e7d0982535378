"""Seeded samplers for the Hilbert-Schmidt ensemble.

Every sampler is a pure function of an :class:`RngStream` value: calling it
twice with the same stream and size returns bit-identical output. Distinct
draws therefore need distinct streams, usually obtained via
:meth:`RngStream.child`.

========================  =====================================================
sampler                   distribution
========================  =====================================================
sample_haar_unitary       Haar measure on U(N) (complex) or O(N) (real)
sample_state_hs           Hilbert-Schmidt (flat) measure on the state body
sample_boundary_state_hs  induced surface measure on the boundary (one
                          eigenvalue exactly zero)
sample_direction          uniform on the unit sphere of traceless Hermitian
                          (or real symmetric) matrices
========================  =====================================================

The interior sampler normalizes a Ginibre Gram matrix G G^dag; a square G
reproduces the flat measure in the complex case, and an N x (N+1) real G in
the real case. Boundary eigenvalues carry the density obtained by setting the
smallest eigenvalue to zero in the flat-measure eigenvalue density:

    f(lambda) ~ prod_{i<j} |l_i - l_j|^beta * prod_i l_i^beta

over the nonzero eigenvalues, with beta = 2 (complex) or 1 (real). A
rectangular Wishart spectrum reproduces f in the complex case; the real
default is a Metropolis chain targeting f directly, and the two routes are
cross-validated against each other in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .hermitian import BipartiteShape, DensityMatrix, TracelessDirection, hermitian_part

_MASK64 = (1 << 64) - 1
_ALGORITHM = "philox4x64"

# Metropolis defaults: enough burn-in for the small simplices used here.
_MH_BURN = 4096
_MH_THIN = 16
_MH_CHAINS = 256


def _splitmix64(x: int) -> int:
    """One splitmix64 round; mixes stream ids for child derivation."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class RngStream:
    """A named pseudorandom stream: (seed, stream id, fixed algorithm).

    The pair (seed, stream) keys a counter-based Philox generator, so streams
    never overlap and results do not depend on evaluation order.
    """

    seed: int
    stream: int = 0

    @property
    def algorithm(self) -> str:
        return _ALGORITHM

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        key = ((self.stream & _MASK64) << 64) | (self.seed & _MASK64)
        return np.random.Generator(np.random.Philox(key=key))

    def child(self, index: int) -> "RngStream":
        """Derived stream for sub-task ``index``; deterministic and disjoint."""
        mixed = _splitmix64((self.stream ^ _splitmix64(index & _MASK64)) & _MASK64)
        return replace(self, stream=mixed)

    def describe(self) -> str:
        return f"{_ALGORITHM}:{self.seed}:{self.stream}"


def _check_field(field: str):
    if field not in ("complex", "real"):
        raise ValueError(f"field must be 'complex' or 'real', got {field!r}")


def _ginibre(gen: np.random.Generator, shape: tuple, field: str) -> np.ndarray:
    """Independent standard Gaussian entries; complex ones get i.i.d. parts."""
    if field == "complex":
        return gen.standard_normal(shape) + 1j * gen.standard_normal(shape)
    return gen.standard_normal(shape)


def sample_haar_unitary(n: int, field: str, rng: RngStream, size: int | None = None):
    """Haar-distributed unitary (orthogonal for ``field='real'``) matrices.

    Parameters
    ----------
    n : matrix dimension
    field : 'complex' or 'real'
    rng : stream to draw from
    size : None for a single (n, n) matrix, else a (size, n, n) stack

    Notes
    -----
    QR of a Ginibre matrix with the R diagonal rephased to be positive; the
    rephasing makes the factorization unique, which is what makes the
    resulting Q exactly Haar rather than merely unitary.
    """
    _check_field(field)
    b = 1 if size is None else int(size)
    g = _ginibre(rng.generator(), (b, n, n), field)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    q = q * (d / np.abs(d))[..., None, :]
    return q[0] if size is None else q


def sample_state_hs(shape: BipartiteShape, rng: RngStream, size: int | None = None):
    """States distributed by the flat Hilbert-Schmidt measure on the body.

    Returns a :class:`DensityMatrix` when ``size`` is None, else a
    (size, N, N) ndarray stack.
    """
    n = shape.n
    b = 1 if size is None else int(size)
    cols = n if shape.field == "complex" else n + 1
    g = _ginibre(rng.generator(), (b, n, cols), shape.field)
    w = g @ np.conj(np.swapaxes(g, -1, -2))
    w = hermitian_part(w)
    tr = np.trace(w, axis1=-2, axis2=-1).real
    rho = w / tr[:, None, None]
    if size is None:
        return DensityMatrix(rho[0], check_psd=False)
    return rho


def _logdensity_boundary(lam: np.ndarray, beta: int) -> np.ndarray:
    """log f over the nonzero eigenvalues, -inf off the open simplex."""
    ok = np.all(lam > 0.0, axis=-1)
    out = np.full(lam.shape[:-1], -np.inf)
    if not np.any(ok):
        return out
    lx = lam[ok]
    s = beta * np.sum(np.log(lx), axis=-1)
    m = lx.shape[-1]
    for i in range(m):
        for j in range(i + 1, m):
            s = s + beta * np.log(np.abs(lx[..., i] - lx[..., j]))
    out[ok] = s
    return out


def boundary_eigenvalues_metropolis(
    n: int,
    field: str,
    rng: RngStream,
    size: int,
    *,
    burn: int = _MH_BURN,
    thin: int = _MH_THIN,
    chains: int = _MH_CHAINS,
) -> np.ndarray:
    """Nonzero boundary eigenvalues via a random-walk Metropolis chain.

    Targets f(lambda) on the (N-2)-simplex directly; serves as the default
    real-case sampler and as the independent oracle for the Wishart route.
    Returns a (size, N-1) array of eigenvalue rows summing to one, sorted
    ascending. Step size adapts during burn-in only, so the kept samples come
    from a fixed, detailed-balanced kernel.
    """
    _check_field(field)
    m = n - 1
    if m < 1:
        raise ValueError(f"need n >= 2, got {n}")
    if m == 1:
        return np.ones((size, 1))
    beta = 2 if field == "complex" else 1
    c = min(chains, max(8, size))
    gen = rng.generator()
    lam = np.sort(gen.dirichlet(np.ones(m), size=c), axis=-1)
    logf = _logdensity_boundary(lam, beta)
    step = 0.5 / m
    acc = 0
    window = 0
    keep_every = max(1, int(thin))
    needed = int(np.ceil(size / c))
    kept = []
    total = burn + needed * keep_every
    for t in range(total):
        z = gen.standard_normal((c, m))
        z -= z.mean(axis=-1, keepdims=True)  # keeps the trace sum fixed
        prop = lam + step * z
        logf_p = _logdensity_boundary(prop, beta)
        u = np.log(gen.random(c))
        accept = u < (logf_p - logf)
        lam = np.where(accept[:, None], prop, lam)
        logf = np.where(accept, logf_p, logf)
        if t < burn:
            acc += int(np.sum(accept))
            window += c
            if window >= 128 * c:
                rate = acc / window
                step *= float(np.exp(0.4 * (rate - 0.35)))
                acc = 0
                window = 0
        elif (t - burn) % keep_every == keep_every - 1:
            kept.append(np.sort(lam, axis=-1))
    out = np.concatenate(kept, axis=0)[:size]
    return out


def boundary_eigenvalues_wishart(
    n: int, field: str, rng: RngStream, size: int
) -> np.ndarray:
    """Nonzero boundary eigenvalues via a rectangular Ginibre Gram spectrum.

    An (N-1) x (N+1) complex Ginibre (or (N-1) x (N+2) real one) has a
    normalized Gram spectrum distributed exactly by f. Returns (size, N-1)
    rows sorted ascending.
    """
    _check_field(field)
    m = n - 1
    if m < 1:
        raise ValueError(f"need n >= 2, got {n}")
    cols = n + 1 if field == "complex" else n + 2
    g = _ginibre(rng.generator(), (size, m, cols), field)
    w = g @ np.conj(np.swapaxes(g, -1, -2))
    lam = np.linalg.eigvalsh(hermitian_part(w))
    lam = lam / np.sum(lam, axis=-1, keepdims=True)
    return lam


@dataclass(frozen=True)
class BoundaryState:
    """A boundary sample: the state and its (exact) zero eigenvector."""

    state: DensityMatrix
    zero_eigvec: np.ndarray


def _assemble_boundary(lam: np.ndarray, u: np.ndarray) -> np.ndarray:
    """rho = U diag(0, lam) U^dag; the zero eigenvalue sits in column 0."""
    b, m = lam.shape
    n = m + 1
    full = np.zeros((b, n), dtype=lam.dtype)
    full[:, 1:] = lam
    rho = (u * full[:, None, :]) @ np.conj(np.swapaxes(u, -1, -2))
    return hermitian_part(rho)


def sample_boundary_state_hs(
    shape: BipartiteShape, rng: RngStream, size: int | None = None
):
    """Boundary states under the induced Hilbert-Schmidt surface measure.

    The eigenvector flag is an independent Haar frame and the smallest
    eigenvalue is exactly zero by construction. Complex eigenvalues use the
    Wishart route; real ones use the Metropolis chain (the validated oracle
    for the real exponents). Returns a :class:`BoundaryState` for
    ``size=None``, else a pair (states, zero_eigvecs) of stacked arrays.
    """
    n = shape.n
    b = 1 if size is None else int(size)
    if shape.field == "complex":
        lam = boundary_eigenvalues_wishart(n, shape.field, rng.child(0), b)
    else:
        lam = boundary_eigenvalues_metropolis(n, shape.field, rng.child(0), b)
    u = sample_haar_unitary(n, shape.field, rng.child(1), b)
    rho = _assemble_boundary(lam, u)
    psi = np.ascontiguousarray(u[:, :, 0])
    if size is None:
        return BoundaryState(DensityMatrix(rho[0], check_psd=False), psi[0])
    return rho, psi


def sample_direction(shape: BipartiteShape, rng: RngStream, size: int | None = None):
    """Uniform directions on the traceless unit sphere of the body's span.

    A Gaussian Hermitian (real symmetric) matrix with i.i.d. standard-normal
    coefficients on any Hilbert-Schmidt orthonormal basis, projected traceless
    and normalized; equivalent to drawing Gaussian coefficients on a
    generalized Gell-Mann basis without materializing the basis.
    """
    n = shape.n
    b = 1 if size is None else int(size)
    g = _ginibre(rng.generator(), (b, n, n), shape.field)
    h = hermitian_part(g)
    tr = np.trace(h, axis1=-2, axis2=-1).real
    h = h - (tr / n)[:, None, None] * np.eye(n, dtype=h.dtype)
    nrm = np.sqrt(np.sum(np.abs(h) ** 2, axis=(-2, -1)))
    h = h / nrm[:, None, None]
    if size is None:
        return TracelessDirection(h[0])
    return h
