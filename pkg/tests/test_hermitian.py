import numpy as np
import pytest

from jensen_order.ensembles import haar_unitary as rand_unitary
from jensen_order.ensembles import random_hermitian
from jensen_order.hermitian import (
    OrderError,
    Projection,
    SpectralError,
    apply_function,
    as_hermitian,
    compress,
    compressed_inverse,
    is_psd,
    opnorm,
    psd_gap,
    schur_complement_identity_residual,
    spectral,
    spectral_projection,
    tol_proj,
    tol_psd,
)
from jensen_order.scalar import DomainError, builtin, parse


def rand_herm(rng, n, spectrum=(0.5, 10.0)):
    return random_hermitian(n, rng, spectrum)


M22 = np.array([[2.0, 1.0], [1.0, 2.0]])
S2 = np.sqrt(2.0)


def _same_line(u, v):
    # eigenvectors are only defined up to a phase
    return abs(abs(np.vdot(u, v)) - 1.0) < 1e-12


def test_spectral_diagonal():
    dec = spectral(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(dec.eigenvalues, [1, 2, 3], atol=1e-14)
    for k, idx in enumerate([1, 2, 0]):
        assert _same_line(dec.eigenvectors[:, k], np.eye(3)[idx])


def test_spectral_2x2_closed_form():
    dec = spectral(M22)
    np.testing.assert_allclose(dec.eigenvalues, [1, 3], atol=1e-14)
    assert _same_line(dec.eigenvectors[:, 0], np.array([1, -1]) / S2)
    assert _same_line(dec.eigenvectors[:, 1], np.array([1, 1]) / S2)


def test_spectral_identity_frame_is_orthonormal():
    dec = spectral(np.eye(4))
    np.testing.assert_allclose(dec.eigenvalues, 1.0, atol=1e-15)
    V = dec.eigenvectors
    assert np.abs(V.conj().T @ V - np.eye(4)).max() <= 1e-12 * 4


def test_spectral_invariants_random(rng):
    for n in range(1, 9):
        M = rand_herm(rng, n, (-5, 5))
        dec = spectral(M)
        assert np.all(np.diff(dec.eigenvalues) >= 0)
        assert opnorm(dec.reconstruct() - M) <= 1e-10 * (1 + opnorm(M))


def test_spectral_error_carries_dimension():
    with pytest.raises(SpectralError, match="dim 2"):
        spectral(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_apply_sqrt_diagonal():
    R = apply_function(builtin("sqrt"), np.diag([1.0, 4.0, 9.0]))
    np.testing.assert_allclose(R, np.diag([1.0, 2.0, 3.0]), atol=1e-14)


def test_apply_sqrt_2x2_same_frame():
    R = apply_function(builtin("sqrt"), M22)
    # closed form: sqrt(M) = P_- + sqrt(3) P_+
    Pm = 0.5 * np.array([[1, -1], [-1, 1]])
    Pp = 0.5 * np.array([[1, 1], [1, 1]])
    np.testing.assert_allclose(R, Pm + np.sqrt(3) * Pp, atol=1e-14)
    np.testing.assert_allclose(R @ R, M22, atol=1e-13)


def test_apply_identity_function(rng):
    M = rand_herm(rng, 5, (-3, 3))
    np.testing.assert_allclose(apply_function(builtin("affine", [1, 0]), M), M, atol=1e-13)


def test_apply_commutes_with_argument(rng):
    M = rand_herm(rng, 6)
    R = apply_function(builtin("log1p"), M)
    assert opnorm(R @ M - M @ R) <= 1e-10 * (1 + opnorm(M)) * (1 + opnorm(R))


def test_apply_domain_error_names_eigenvalue():
    with pytest.raises(DomainError, match="-0.5"):
        apply_function(builtin("sqrt"), np.diag([-0.5, 3.0]))


def test_apply_clips_roundoff_below_domain():
    R = apply_function(builtin("sqrt"), np.diag([-1e-13, 4.0]))
    np.testing.assert_allclose(R, np.diag([0.0, 2.0]), atol=1e-15)


@pytest.mark.parametrize("spec", ["sqrt", "pow:0.3", "log1p", "square", "compose(sqrt,sqrt)"])
def test_unitary_covariance(rng, spec):
    f = parse(spec)
    for n in (1, 3, 6):
        M = rand_herm(rng, n)
        U = rand_unitary(n, rng)
        lhs = apply_function(f, U @ M @ U.conj().T)
        rhs = U @ apply_function(f, M) @ U.conj().T
        assert opnorm(lhs - rhs) <= 1e-10 * (1 + opnorm(rhs))


def test_spectral_projection_examples():
    D = np.diag([1.0, 2.0, 3.0])
    P = spectral_projection(D, 1.5, 3.0)
    assert P.rank == 1
    np.testing.assert_allclose(P.matrix, np.diag([0, 1, 0]), atol=1e-15)
    full = spectral_projection(D, 0.0, 10.0)
    assert full.rank == 3
    np.testing.assert_allclose(full.matrix, np.eye(3), atol=1e-15)
    P2 = spectral_projection(M22, 0.0, 2.0)
    assert P2.rank == 1
    np.testing.assert_allclose(P2.matrix, 0.5 * np.array([[1, -1], [-1, 1]]), atol=1e-14)


def test_spectral_projection_half_open_and_flag():
    D = np.diag([1.0, 2.0, 3.0])
    P = spectral_projection(D, 2.0, 3.0)
    assert P.rank == 1 and P.near_boundary
    np.testing.assert_allclose(P.matrix, np.diag([0, 1, 0]), atol=1e-15)
    assert not spectral_projection(D, 1.5, 2.5).near_boundary
    assert spectral_projection(D, 5.0, 6.0).rank == 0


def test_spectral_projection_partition(rng):
    M = rand_herm(rng, 7, (0, 10))
    edges = np.sort(np.concatenate([[0.0, 10.0], rng.uniform(0, 10, 4)]))
    parts = [spectral_projection(M, lo, hi) for lo, hi in zip(edges[:-1], edges[1:])]
    total = spectral_projection(M, 0.0, 10.0)
    tol = tol_proj(7)
    assert opnorm(sum(p.matrix for p in parts) - total.matrix) <= tol
    for i, p in enumerate(parts):
        p.check()
        for q in parts[i + 1:]:
            assert opnorm(p.matrix @ q.matrix) <= tol


def test_projection_complement_and_from_vectors(rng):
    P = Projection.from_vectors(rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2)))
    assert P.rank == 2
    C = P.complement()
    assert C.rank == 3
    np.testing.assert_allclose(P.matrix + C.matrix, np.eye(5), atol=1e-13)
    # rank-deficient input collapses
    v = rng.standard_normal(4)
    assert Projection.from_vectors(np.column_stack([v, 2 * v])).rank == 1


def test_psd_gap_examples():
    assert psd_gap(np.diag([1.0, 0.0])) == 0.0
    assert psd_gap(M22) == pytest.approx(1.0, abs=1e-14)
    assert psd_gap(np.diag([-0.5, 3.0])) == -0.5
    assert is_psd(np.diag([1.0, -1e-12]))
    assert not is_psd(np.diag([1.0, -1e-6]))


def test_compress_examples(rng):
    e1 = Projection.coordinate(2, [0])
    np.testing.assert_allclose(compress(np.diag([1.0, 2.0]), e1), [[1.0]])
    np.testing.assert_allclose(compress(M22, e1), [[2.0]])
    M = rand_herm(rng, 4)
    np.testing.assert_allclose(compress(M, Projection.coordinate(4, range(4))), M, atol=1e-14)


def test_compressed_inverse_examples(rng):
    e1 = Projection.coordinate(2, [0])
    np.testing.assert_allclose(compressed_inverse(M22, e1), [[1.5]], atol=1e-14)
    np.testing.assert_allclose(compressed_inverse(np.diag([2.0, 5.0]), e1), [[2.0]], atol=1e-14)
    P = Projection.from_vectors(rng.standard_normal((5, 3)))
    np.testing.assert_allclose(compressed_inverse(np.eye(5), P), np.eye(3), atol=1e-13)


def test_compressed_inverse_requires_pd():
    with pytest.raises(OrderError):
        compressed_inverse(np.diag([1.0, 0.0]), Projection.coordinate(2, [0]))


def test_compression_spectral_containment(rng):
    for n in range(2, 8):
        M = rand_herm(rng, n, (-4, 9))
        w = np.linalg.eigvalsh(M)
        P = Projection.from_vectors(rng.standard_normal((n, int(rng.integers(1, n + 1)))))
        c = np.linalg.eigvalsh(compress(M, P))
        t = tol_psd(M)
        assert c.min() >= w[0] - t and c.max() <= w[-1] + t


def test_schur_examples():
    assert schur_complement_identity_residual(M22, Projection.coordinate(2, [0])) <= 1e-15
    D = np.diag([1.0, 4.0, 7.0, 2.0])
    assert schur_complement_identity_residual(D, Projection.coordinate(4, [1, 3])) <= 1e-15


def test_schur_random_pd(rng):
    for _ in range(100):
        n = int(rng.integers(2, 9))
        M = rand_herm(rng, n, (0.5, 10))
        r = int(rng.integers(1, n))
        P = Projection.from_vectors(rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r)))
        assert schur_complement_identity_residual(M, P) <= 1e-10 * (1 + opnorm(M))


def test_schur_rejects_bad_input():
    with pytest.raises(OrderError):
        schur_complement_identity_residual(np.diag([1.0, -1.0]), Projection.coordinate(2, [0]))
    with pytest.raises(ValueError):
        schur_complement_identity_residual(M22, Projection.coordinate(2, [0, 1]))


def test_norm_identity(rng):
    for n in (1, 3, 7):
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        a2 = opnorm(A) ** 2
        assert abs(opnorm(A @ A.conj().T) - a2) <= 1e-12 * a2
        assert abs(opnorm(A.conj().T @ A) - a2) <= 1e-12 * a2


def test_as_hermitian():
    with pytest.raises(ValueError):
        as_hermitian(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        as_hermitian(np.array([[1.0, 1 + 1e-15], [1.0, 1.0]]), exact=True)
    H = as_hermitian(np.array([[1.0, 1j], [-1j, 2.0]]), exact=True)
    assert np.array_equal(H, H.conj().T)
