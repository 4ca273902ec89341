"""Dense Hermitian linear algebra: spectra, functional calculus, projections.

Matrices are plain complex ``numpy`` arrays of shape ``(n, n)``. Every
operation here is a pure function; matrices produced internally are
re-symmetrized with ``(M + M^*) / 2`` to stop rounding drift.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .scalar import DomainError, ScalarFunction

__all__ = [
    "OrderError",
    "SpectralError",
    "SpectralDecomposition",
    "Projection",
    "as_hermitian",
    "symmetrize",
    "opnorm",
    "tol_psd",
    "tol_cluster",
    "tol_proj",
    "spectral",
    "apply_function",
    "apply_callable",
    "spectral_projection",
    "psd_gap",
    "is_psd",
    "compress",
    "compressed_inverse",
    "schur_complement_identity_residual",
]

TOL_DOM = 1e-12


class OrderError(ValueError):
    """A matrix required to be positive definite is not."""


class SpectralError(np.linalg.LinAlgError):
    """The Hermitian eigensolver failed or returned an inaccurate frame."""


def opnorm(M) -> float:
    """Operator (spectral) norm."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def tol_psd(M) -> float:
    return 1e-9 * (1.0 + opnorm(M))


def tol_cluster(M) -> float:
    return 1e-9 * (1.0 + opnorm(M))


def tol_proj(dim: int) -> float:
    return 1e-10 * max(dim, 1)


def symmetrize(M) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    return 0.5 * (M + M.conj().T)


def as_hermitian(M, exact=False) -> np.ndarray:
    """Validate ``M`` as a square Hermitian matrix and return a complex copy.

    With ``exact=True`` (used for input files) the check has zero tolerance;
    otherwise ``M`` is accepted within rounding and symmetrized.
    """
    M = np.array(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    dev = np.abs(M - M.conj().T).max()
    if exact:
        if dev != 0:
            raise ValueError(f"matrix is not exactly Hermitian (max deviation {dev:.3g})")
        return M
    if dev > 1e-10 * (1.0 + np.abs(M).max()):
        raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3g})")
    return symmetrize(M)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues with the matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return symmetrize((V * self.eigenvalues) @ V.conj().T)


def spectral(M) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix with accuracy checks.

    Raises
    ------
    SpectralError
        If the solver does not converge or the frame fails the
        orthonormality / reconstruction tolerances.
    """
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    if not np.all(np.isfinite(M)):
        raise SpectralError(f"non-finite entries in a dim {n} matrix")
    try:
        w, V = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(
            f"eigh failed for dim {n} (condition estimate {_cond(M):.3g}): {exc}"
        ) from exc
    orth = np.abs(V.conj().T @ V - np.eye(n)).max()
    recon = opnorm((V * w) @ V.conj().T - M)
    # written as a negation so that NaN residuals also fail
    if not (orth <= 1e-12 * n and recon <= 1e-10 * (1.0 + opnorm(M))):
        raise SpectralError(
            f"inaccurate eigendecomposition for dim {n} (condition estimate "
            f"{_cond(M):.3g}): orthogonality {orth:.3g}, reconstruction {recon:.3g}"
        )
    return SpectralDecomposition(w, V)


def _cond(M) -> float:
    try:
        return float(np.linalg.cond(M))
    except np.linalg.LinAlgError:
        return float("inf")


def apply_callable(fn, M) -> np.ndarray:
    """``V diag(fn(w)) V^*`` for an arbitrary vectorised callable."""
    dec = spectral(M)
    V = dec.eigenvectors
    return symmetrize((V * fn(dec.eigenvalues)) @ V.conj().T)


def apply_function(f: ScalarFunction, M) -> np.ndarray:
    """Functional calculus ``f(M)``.

    Eigenvalues within ``1e-12`` outside the domain of ``f`` are clipped onto
    it; anything further out raises :class:`DomainError`.
    """
    dec = spectral(M)
    w = dec.eigenvalues.copy()
    bad = ~f.domain.contains(w, tol=TOL_DOM)
    if np.any(bad):
        raise DomainError(
            f"eigenvalue {w[bad][0]!r} outside domain {f.domain} of {f.name}"
        )
    if f.domain.closed_lo:
        w = np.maximum(w, f.domain.lo)
    else:
        # open end: nudge onto the interior
        w = np.maximum(w, np.nextafter(f.domain.lo, np.inf))
    w = np.minimum(w, np.nextafter(f.domain.hi, -np.inf))
    V = dec.eigenvectors
    return symmetrize((V * f.fn(w)) @ V.conj().T)


@dataclass(frozen=True)
class Projection:
    """Orthogonal projection stored with an orthonormal basis of its range.

    ``basis`` has shape ``(dim, rank)``; ``matrix`` is ``basis @ basis^*``.
    ``near_boundary`` is set by :func:`spectral_projection` when an
    eigenvalue sat within the clustering tolerance of an interval end.
    """

    basis: np.ndarray
    near_boundary: bool = False
    matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        B = self.basis
        object.__setattr__(self, "matrix", symmetrize(B @ B.conj().T))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def from_vectors(cls, vectors) -> "Projection":
        """Projection onto the span of the given columns (orthonormalized)."""
        A = np.asarray(vectors, dtype=complex)
        if A.ndim == 1:
            A = A[:, None]
        if A.shape[1] == 0:
            return cls(A)
        U, s, _ = np.linalg.svd(A, full_matrices=False)
        r = int(np.sum(s > 1e-12 * max(s[0], 1e-300)))
        return cls(U[:, :r])

    @classmethod
    def coordinate(cls, dim: int, indices) -> "Projection":
        return cls(np.eye(dim, dtype=complex)[:, list(indices)])

    def complement(self) -> "Projection":
        """Projection onto the orthogonal complement of the range."""
        n, r = self.basis.shape
        if r == 0:
            return Projection(np.eye(n, dtype=complex))
        Q, _ = np.linalg.qr(self.basis, mode="complete")
        return Projection(Q[:, r:])

    def check(self) -> None:
        P, tol = self.matrix, tol_proj(self.dim)
        if opnorm(P @ P - P) > tol or abs(np.trace(P).real - self.rank) > tol * self.dim:
            raise ValueError("not a projection within tolerance")


def spectral_projection(M, a: float, b: float) -> Projection:
    """Spectral projection of ``M`` onto eigenvalues in the half-open ``[a, b)``.

    Membership is decided on the computed eigenvalues; if any eigenvalue is
    within :func:`tol_cluster` of ``a`` or ``b`` the result is flagged
    ``near_boundary``.
    """
    dec = spectral(M)
    w, V = dec.eigenvalues, dec.eigenvectors
    keep = (w >= a) & (w < b)
    tc = tol_cluster(M)
    near = bool(np.any(np.abs(w - a) <= tc) or np.any(np.abs(w - b) <= tc))
    return Projection(V[:, keep], near_boundary=near)


def psd_gap(M) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    M = np.asarray(M)
    if M.size == 0:
        return float("inf")
    return float(np.linalg.eigvalsh(M)[0])


def is_psd(M) -> bool:
    """Loewner test ``M >= 0`` with the relative tolerance :func:`tol_psd`."""
    return psd_gap(M) >= -tol_psd(M)


def compress(M, P: Projection) -> np.ndarray:
    """``P M P`` expressed on the range basis of ``P`` (shape ``rank x rank``)."""
    B = P.basis
    return symmetrize(B.conj().T @ np.asarray(M) @ B)


def _require_pd(M) -> None:
    gap = psd_gap(M)
    if gap <= tol_psd(M):
        raise OrderError(f"matrix is not positive definite (smallest eigenvalue {gap:.3g})")


def compressed_inverse(M, P: Projection) -> np.ndarray:
    """``(P M^{-1} P)^{-1}`` on the range of ``P``."""
    _require_pd(M)
    Minv = symmetrize(np.linalg.inv(M))
    return symmetrize(np.linalg.inv(compress(Minv, P)))


def schur_complement_identity_residual(M, P: Projection) -> float:
    """Norm of ``(P M^{-1} P)^{-1} - [PMP - PMP'(P'MP')^{-1}P'MP]`` on ran P.

    ``P'`` is the complementary projection ``1 - P``.
    """
    _require_pd(M)
    if not 0 < P.rank < P.dim:
        raise ValueError("projection rank must be strictly between 0 and dim")
    M = np.asarray(M, dtype=complex)
    B, C = P.basis, P.complement().basis
    lhs = compressed_inverse(M, P)
    top = B.conj().T @ M @ C
    rhs = compress(M, P) - top @ np.linalg.solve(compress(M, P.complement()), top.conj().T)
    return opnorm(lhs - symmetrize(rhs))
