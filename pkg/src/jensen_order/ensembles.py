"""Random Hermitian matrices with prescribed spectra."""

from __future__ import annotations

import numpy as np

from .hermitian import symmetrize

__all__ = ["haar_unitary", "random_hermitian", "random_pair_apart"]


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR factorization of a complex Ginibre matrix.

    The phases of ``diag(R)`` are divided out so the distribution is exactly Haar.
    """
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def random_hermitian(n: int, rng: np.random.Generator, spectrum=(0.5, 10.0),
                     eigenvalues=None) -> np.ndarray:
    """``V diag(u) V^*`` with Haar ``V`` and ``u`` uniform on ``spectrum``.

    The result is exactly Hermitian in floating point.
    """
    if eigenvalues is None:
        eigenvalues = rng.uniform(spectrum[0], spectrum[1], size=n)
    V = haar_unitary(n, rng)
    return symmetrize((V * np.asarray(eigenvalues, dtype=float)) @ V.conj().T)


def random_pair_apart(n: int, rng: np.random.Generator, spectrum=(0.5, 10.0),
                      min_distance=0.1, near=False, max_tries=1000):
    """A pair with ``||X - Y|| >= min_distance``.

    By default ``X`` and ``Y`` are independent draws. With ``near=True``,
    ``Y = X + E`` where ``E`` is a random Hermitian direction scaled to norm
    exactly ``min_distance``; ``Y``'s spectrum may then leave ``spectrum``
    by at most ``min_distance``.
    """
    if near:
        X = random_hermitian(n, rng, spectrum)
        G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        E = symmetrize(G)
        E *= min_distance * (1 + 1e-9) / np.linalg.norm(E, 2)
        return X, symmetrize(X + E)
    for _ in range(max_tries):
        X = random_hermitian(n, rng, spectrum)
        Y = random_hermitian(n, rng, spectrum)
        if np.linalg.norm(X - Y, 2) >= min_distance:
            return X, Y
    raise RuntimeError("could not draw a pair far enough apart")
