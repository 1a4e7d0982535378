"""Hermitian matrix algebra on bipartite systems: Hilbert-Schmidt geometry,
partial transposition and the PPT test."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PSD_TOL = 1e-10
PPT_TOL = 1e-12
HERM_ATOL = 1e-12


class DimensionMismatchError(ValueError):
    """Matrix size does not factor as the declared K x M system."""


def _as_matrix(a) -> np.ndarray:
    """Accept a wrapper type or a bare array, return the underlying ndarray."""
    if isinstance(a, HermitianMatrix) or isinstance(a, TracelessDirection):
        return a.mat
    m = np.asarray(a)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def hermitian_part(a: np.ndarray) -> np.ndarray:
    """Canonical Hermitian representative (A + A^dag)/2. Works on stacks."""
    a = np.asarray(a)
    return 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))


@dataclass(frozen=True)
class BipartiteShape:
    """A K x M tensor factorization, K >= 1 and M >= 2, over a matrix field."""

    k: int
    m: int
    field: str = "complex"

    def __post_init__(self):
        if not (isinstance(self.k, int) and self.k >= 1):
            raise ValueError(f"k must be an integer >= 1, got {self.k!r}")
        if not (isinstance(self.m, int) and self.m >= 2):
            raise ValueError(f"m must be an integer >= 2, got {self.m!r}")
        if self.field not in ("complex", "real"):
            raise ValueError(f"field must be 'complex' or 'real', got {self.field!r}")

    @property
    def n(self) -> int:
        return self.k * self.m

    @property
    def dim_body(self) -> int:
        """Dimension of the set of trace-one Hermitian (symmetric) matrices."""
        n = self.n
        if self.field == "complex":
            return n * n - 1
        return n * (n + 1) // 2 - 1

    @property
    def is_bipartite(self) -> bool:
        """True when partial transposition acts nontrivially (K >= 2)."""
        return self.k >= 2

    def __str__(self):
        return f"{self.k}x{self.m} {self.field}"


class HermitianMatrix:
    """A Hermitian matrix, canonicalized to (A + A^dag)/2 on construction."""

    __slots__ = ("mat",)

    def __init__(self, mat):
        m = np.asarray(mat)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        m = hermitian_part(m.astype(np.result_type(m.dtype, np.float64)))
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


class DensityMatrix(HermitianMatrix):
    """Hermitian, trace renormalized to one, positive semidefinite up to tol.

    ``check_psd=False`` skips the eigenvalue check for matrices that are
    positive by construction (e.g. G G^dag sampler output).
    """

    __slots__ = ()

    def __init__(self, mat, *, tol_psd: float = PSD_TOL, check_psd: bool = True):
        super().__init__(mat)
        tr = float(np.trace(self.mat).real)
        if abs(tr) < 1e-14:
            raise ValueError(f"trace {tr:.3e} too small to renormalize")
        m = self.mat / tr
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)
        if check_psd:
            lo = float(np.linalg.eigvalsh(self.mat)[0])
            if lo < -tol_psd:
                raise ValueError(
                    f"matrix is not positive semidefinite: min eigenvalue {lo:.3e} "
                    f"< -{tol_psd:.1e}"
                )


class TracelessDirection:
    """A traceless Hermitian matrix of unit Hilbert-Schmidt norm.

    Construction validates rather than repairs; use :meth:`toward` to project
    an arbitrary Hermitian matrix onto the direction sphere.
    """

    __slots__ = ("mat",)

    def __init__(self, mat, *, atol: float = HERM_ATOL):
        m = hermitian_part(np.asarray(mat, dtype=np.result_type(mat, np.float64)))
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        tr = complex(np.trace(m))
        if abs(tr) > atol:
            raise ValueError(f"direction is not traceless: trace = {tr:.3e}")
        nrm = float(np.sqrt(np.sum(np.abs(m) ** 2)))
        if abs(nrm - 1.0) > atol:
            raise ValueError(f"direction is not unit norm: |omega| = {nrm:.16f}")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    def __setattr__(self, name, value):
        raise AttributeError("TracelessDirection is immutable")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def toward(cls, target) -> "TracelessDirection":
        """Unit direction from the maximally mixed state toward ``target``."""
        m = hermitian_part(_as_matrix(target))
        n = m.shape[0]
        m = m - (np.trace(m).real / n) * np.eye(n, dtype=m.dtype)
        nrm = float(np.sqrt(np.sum(np.abs(m) ** 2)))
        if nrm < 1e-14:
            raise ValueError("target is proportional to the identity")
        return cls(m / nrm)

    def __repr__(self):
        return f"TracelessDirection(dim={self.dim})"


def hs_inner(a, b) -> float:
    """Hilbert-Schmidt inner product Tr(A B) of Hermitian A, B (real)."""
    am, bm = _as_matrix(a), _as_matrix(b)
    if am.shape != bm.shape:
        raise ValueError(f"shape mismatch {am.shape} vs {bm.shape}")
    # Tr(A B) = sum_ij A_ij conj(B_ij) for Hermitian B
    return float(np.sum(am * np.conj(bm)).real)


def hs_norm(a) -> float:
    """Hilbert-Schmidt norm sqrt(Tr A^2)."""
    am = _as_matrix(a)
    return float(np.sqrt(np.sum(np.abs(am) ** 2)))


def hs_distance(a, b) -> float:
    """Hilbert-Schmidt distance sqrt(Tr (A - B)^2)."""
    am, bm = _as_matrix(a), _as_matrix(b)
    if am.shape != bm.shape:
        raise ValueError(f"shape mismatch {am.shape} vs {bm.shape}")
    return float(np.sqrt(np.sum(np.abs(am - bm) ** 2)))


def partial_transpose(a, shape: BipartiteShape):
    """Transpose the first tensor factor of a K x M system.

    Acts on stacks of matrices along leading axes. Wrapper input is returned
    re-wrapped; bare arrays come back as arrays.
    """
    wrapped = isinstance(a, HermitianMatrix)
    m = _as_matrix(a)
    n = shape.n
    if m.shape[-1] != n:
        raise DimensionMismatchError(
            f"matrix dimension {m.shape[-1]} != {shape.k}*{shape.m} = {n}"
        )
    lead = m.shape[:-2]
    r = m.reshape(lead + (shape.k, shape.m, shape.k, shape.m))
    r = np.swapaxes(r, -4, -2)
    out = np.ascontiguousarray(r.reshape(lead + (n, n)))
    if wrapped:
        return type(a)(out) if not isinstance(a, DensityMatrix) else DensityMatrix(
            out, check_psd=False
        )
    return out


def min_eigenvalue(a) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    m = hermitian_part(_as_matrix(a))
    try:
        w = np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"eigensolver failed on a {m.shape[-1]}x{m.shape[-1]} matrix: {exc}"
        ) from exc
    return float(w[0])


def is_ppt(rho, shape: BipartiteShape, tol: float = PPT_TOL) -> bool:
    """Whether the partial transpose of ``rho`` has no eigenvalue below -tol."""
    return min_eigenvalue(partial_transpose(_as_matrix(rho), shape)) >= -tol


def negativity(rho, shape: BipartiteShape) -> float:
    """Sum of the absolute values of negative partial-transpose eigenvalues.

    Zero exactly when the state is PPT; positive for every entangled pure
    state of a bipartite system.
    """
    pt = partial_transpose(hermitian_part(_as_matrix(rho)), shape)
    w = np.linalg.eigvalsh(pt)
    return float(-np.sum(np.minimum(w, 0.0)))


def maximally_mixed(n: int, field: str = "complex") -> np.ndarray:
    """The fixed point I/N of partial transposition."""
    dtype = np.complex128 if field == "complex" else np.float64
    return np.eye(n, dtype=dtype) / n
