import numpy as np
import pytest

from jensen_order.ensembles import haar_unitary, random_hermitian
from jensen_order.hermitian import apply_function
from jensen_order.relation import (
    check_relation_sphere,
    check_relation_tangent,
    dual_relation_check,
    jensen_value,
    normalize_direction,
    tangent_gap,
    tangent_scan,
)
from jensen_order.scalar import DomainError, builtin, parse

SQRT = builtin("sqrt")
CONCAVE = ["sqrt", "pow:0.3", "log1p"]


def brute_force_margin(h, A, B, m=181):
    """min of h(<B xi,xi>) - <h(A) xi,xi> over a dense grid of C^2 unit vectors."""
    hA = apply_function(h, A)
    th, ph = np.meshgrid(np.linspace(0, np.pi / 2, m), np.linspace(0, 2 * np.pi, 2 * m))
    xi = np.stack([np.cos(th).ravel(), (np.exp(1j * ph) * np.sin(th)).ravel()])
    a = np.real(np.sum(xi.conj() * (hA @ xi), axis=0))
    b = np.real(np.sum(xi.conj() * (B @ xi), axis=0))
    return float(np.min(h.fn(np.maximum(b, h.domain.lo)) - a))


def test_tangent_gap_examples():
    assert tangent_gap(SQRT, [[1.0]], [[1.0]], 1.0) == pytest.approx(0.0, abs=1e-15)
    assert tangent_gap(SQRT, [[4.0]], [[1.0]], 1.0) == pytest.approx(-1.0, abs=1e-14)
    assert tangent_gap(SQRT, [[1.0]], [[4.0]], 4.0) == pytest.approx(1.0, abs=1e-14)


def test_tangent_gap_rejects_boundary_lambda():
    with pytest.raises(DomainError):
        tangent_gap(SQRT, [[1.0]], [[1.0]], 0.0)


def test_tangent_examples():
    D = np.diag([1.0, 4.0])
    v = check_relation_tangent(SQRT, D, D)
    assert v.holds and abs(v.margin) <= v.tolerance
    v = check_relation_tangent(SQRT, [[4.0]], [[1.0]])
    assert not v.holds
    assert abs(abs(v.witness[0]) - 1) <= 1e-12
    assert (v.lhs, v.rhs) == pytest.approx((2.0, 1.0), abs=1e-12)
    assert check_relation_tangent(SQRT, np.diag([1.0, 2.0]), np.diag([2.0, 3.0])).holds


def test_tangent_requires_concave():
    with pytest.raises(ValueError, match="concave"):
        check_relation_tangent(builtin("square"), np.eye(2), np.eye(2))


def test_tangent_scan_stays_in_spectrum_of_B(rng):
    h = parse("pow:0.3")
    A = random_hermitian(4, rng)
    B = random_hermitian(4, rng)
    scan = tangent_scan(h, apply_function(h, A), B)
    w = np.linalg.eigvalsh(B)
    assert scan.lambda_grid.min() >= w[0] - 1e-6 and scan.lambda_grid.max() <= w[-1] + 1e-6
    assert np.all(np.isfinite(scan.gaps))
    assert scan.gap_star <= scan.gaps.min()


def test_sphere_examples(rng):
    A = random_hermitian(4, rng)
    v = check_relation_sphere(SQRT, A, A)
    assert v.holds and v.margin >= -v.tolerance
    for a, b in [(4.0, 1.0), (1.0, 4.0), (2.0, 2.5)]:
        v = check_relation_sphere(SQRT, [[a]], [[b]], restarts=4)
        assert v.holds == (np.sqrt(a) <= np.sqrt(b))
        assert v.margin == pytest.approx(np.sqrt(b) - np.sqrt(a), abs=1e-14)


def test_sphere_is_deterministic(rng):
    A, B = random_hermitian(3, rng), random_hermitian(3, rng)
    v1 = check_relation_sphere(SQRT, A, B, seed=7)
    v2 = check_relation_sphere(SQRT, A, B, seed=7)
    assert v1.margin == v2.margin


def test_dual_examples():
    X, Y = np.diag([1.0, 2.0]), np.diag([1.0, 3.0])
    for method in ("tangent", "sphere"):
        first, second = dual_relation_check(SQRT, X, X, "concave-le", method=method)
        assert first.holds and second.holds
        first, second = dual_relation_check(SQRT, X, Y, "concave-le", method=method)
        assert first.holds and not second.holds
        assert second.ordering == "Y,X"
        assert abs(abs(second.witness[1]) - 1) <= 1e-6
    D = np.diag([1.0, 2.0])
    first, second = dual_relation_check(builtin("square"), D, D, "convex-ge")
    assert first.holds and second.holds


def test_direction_mismatch():
    with pytest.raises(ValueError):
        normalize_direction(SQRT, "convex-ge")
    with pytest.raises(ValueError):
        normalize_direction(builtin("square"), "concave-le")
    with pytest.raises(ValueError):
        normalize_direction(SQRT, "sideways")
    assert normalize_direction(builtin("square"), "convex-≥").name == "neg(square)"


@pytest.mark.parametrize("spec", CONCAVE)
def test_agreement_with_brute_force_in_dim_two(rng, spec):
    h = parse(spec)
    checked = 0
    for _ in range(40):
        A = random_hermitian(2, rng, (0.5, 10))
        B = A + random_hermitian(2, rng, (-0.5, 1.5))
        if np.linalg.eigvalsh(B)[0] <= 0.1:
            continue
        ref = brute_force_margin(h, A, B)
        if abs(ref) < 1e-3:
            continue  # too close to call on the grid
        checked += 1
        t = check_relation_tangent(h, A, B)
        s = check_relation_sphere(h, A, B, restarts=16)
        assert t.holds == s.holds == (ref > 0)
        # grid minimum bounds the true minimum from above
        assert s.margin <= ref + 1e-12
    assert checked >= 10


@pytest.mark.parametrize("spec", CONCAVE)
def test_method_agreement_random(rng, spec):
    h = parse(spec)
    for i in range(20):
        n = int(rng.integers(1, 7))
        A = random_hermitian(n, rng)
        B = A + random_hermitian(n, rng, (0, 1)) if i % 2 else random_hermitian(n, rng)
        t = check_relation_tangent(h, A, B)
        s = check_relation_sphere(h, A, B, restarts=32, seed=i)
        assert t.holds == s.holds
        if not t.holds:
            hA = apply_function(h, A)
            for v in (t, s):
                lhs, rhs = jensen_value(h, hA, B, v.witness)
                assert lhs - rhs > v.tolerance
                assert abs(np.linalg.norm(v.witness) - 1) <= 1e-12
                assert lhs == pytest.approx(v.lhs, rel=1e-12)
                assert rhs == pytest.approx(v.rhs, rel=1e-12)


def test_tangent_gap_nonnegative_when_relation_holds(rng):
    # operator inequality is necessary for the vector relation
    h = SQRT
    hits = 0
    for _ in range(20):
        A = random_hermitian(4, rng)
        B = A + random_hermitian(4, rng, (0, 1))
        s = check_relation_sphere(h, A, B, restarts=16)
        if not s.holds:
            continue
        hits += 1
        hA = apply_function(h, A)
        scan = tangent_scan(h, hA, B)
        assert scan.gaps.min() >= -10 * s.tolerance
    assert hits >= 10


@pytest.mark.parametrize("spec", CONCAVE)
def test_scalar_consistency(rng, spec):
    h = parse(spec)
    for a, b in rng.uniform(0.2, 10, (30, 2)):
        v = check_relation_tangent(h, [[a]], [[b]])
        assert v.holds == (h(a) <= h(b) + v.tolerance)


def test_unitary_covariance(rng):
    h = parse("log1p")
    for i in range(10):
        n = int(rng.integers(2, 6))
        A = random_hermitian(n, rng)
        B = random_hermitian(n, rng) if i % 2 else A + random_hermitian(n, rng, (0, 1))
        U = haar_unitary(n, rng)
        v = check_relation_tangent(h, A, B)
        w = check_relation_tangent(h, U @ A @ U.conj().T, U @ B @ U.conj().T)
        assert v.holds == w.holds
        assert v.margin == pytest.approx(w.margin, abs=1e-8)


def test_verdict_serialization():
    v = check_relation_tangent(SQRT, [[4.0]], [[1.0]])
    d = v.to_dict()
    assert d["holds"] is False and d["method"] == "tangent"
    assert set(d["witness"]) == {"vector", "lhs", "rhs"}
    assert "lambda_star" in d
