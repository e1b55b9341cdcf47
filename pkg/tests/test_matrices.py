import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kpq.matrices import (
    EigenDecomposition,
    MatrixError,
    adjoint,
    hermitian_eig,
    mat_exp_hermitian,
    mat_mul,
    matrix_from_json,
    matrix_to_json,
    operator_norm,
    schatten_norm,
    singular_values,
)


def random_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_hermitian(rng, n):
    a = random_complex(rng, n)
    return 0.5 * (a + a.conj().T)


# ---------------------------------------------------------------- mat_mul


def test_mat_mul_identity():
    rng = np.random.default_rng(1)
    x = random_complex(rng, 2)
    assert np.array_equal(mat_mul(np.eye(2), x), x)


def test_mat_mul_nilpotent():
    n = np.array([[0, 1], [0, 0]], dtype=complex)
    assert np.all(mat_mul(n, n) == 0)


def test_mat_mul_against_triple_loop():
    rng = np.random.default_rng(2)
    a, b = random_complex(rng, 4), random_complex(rng, 4)
    oracle = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            for k in range(4):
                oracle[i, j] += a[i, k] * b[k, j]
    assert np.max(np.abs(mat_mul(a, b) - oracle)) <= 1e-12


def test_mat_mul_dimension_mismatch():
    with pytest.raises(MatrixError):
        mat_mul(np.eye(2), np.eye(3))


# ---------------------------------------------------------------- adjoint


def test_adjoint_hermitian_fixed_point():
    h = random_hermitian(np.random.default_rng(3), 4)
    assert np.array_equal(adjoint(h), h)


def test_adjoint_shift():
    a = np.array([[0, 1], [0, 0]], dtype=complex)
    assert np.array_equal(adjoint(a), np.array([[0, 0], [1, 0]], dtype=complex))


def test_adjoint_antihomomorphism():
    rng = np.random.default_rng(4)
    a, b = random_complex(rng, 3), random_complex(rng, 3)
    assert np.max(np.abs(adjoint(a @ b) - adjoint(b) @ adjoint(a))) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=2**32 - 1))
def test_adjoint_involution(n, seed):
    a = random_complex(np.random.default_rng(seed), n)
    assert np.array_equal(adjoint(adjoint(a)), a)


# ---------------------------------------------------------------- hermitian_eig


def test_eig_diagonal():
    eig = hermitian_eig(np.diag([3.0, 1.0, 2.0]).astype(complex))
    assert np.allclose(eig.eigenvalues, [1.0, 2.0, 3.0], atol=1e-13)


def test_eig_pauli_x():
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    eig = hermitian_eig(sx)
    assert np.allclose(eig.eigenvalues, [-1.0, 1.0], atol=1e-13)


def _char_poly_det(a, lam):
    return float(np.real(np.linalg.det(a - lam * np.eye(a.shape[0]))))


def test_eig_bracketed_by_char_poly_sign_changes():
    # Oracle: bisection on det(A - lambda I). Each returned eigenvalue must be
    # bracketed by a sign change and agree with the bisection root.
    rng = np.random.default_rng(5)
    a = random_hermitian(rng, 8)
    vals = hermitian_eig(a).eigenvalues
    gaps = np.diff(vals)
    assert np.min(gaps) > 1e-6  # random spectra are simple
    for i, lam in enumerate(vals):
        lo = lam - (gaps[i - 1] / 2 if i > 0 else 1.0)
        hi = lam + (gaps[i] / 2 if i < 7 else 1.0)
        flo, fhi = _char_poly_det(a, lo), _char_poly_det(a, hi)
        assert flo * fhi < 0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            fmid = _char_poly_det(a, mid)
            if flo * fmid <= 0:
                hi = mid
            else:
                lo, flo = mid, fmid
        assert abs(0.5 * (lo + hi) - lam) <= 1e-8


def test_eig_decomposition_invariants():
    rng = np.random.default_rng(6)
    for n in (2, 5, 16, 33):
        a = random_hermitian(rng, n)
        eig = hermitian_eig(a)
        assert isinstance(eig, EigenDecomposition)
        assert np.all(np.diff(eig.eigenvalues) >= 0)
        recon = (eig.vectors * eig.eigenvalues) @ eig.vectors.conj().T
        scale = 1.0 + operator_norm(a)
        assert operator_norm(recon - a) <= 1e-10 * scale
        assert operator_norm(eig.vectors.conj().T @ eig.vectors - np.eye(n)) <= 1e-10


def test_eig_rejects_non_hermitian():
    with pytest.raises(MatrixError):
        hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))


# ---------------------------------------------------------------- operator_norm


def test_operator_norm_identity():
    for n in (1, 3, 7):
        assert abs(operator_norm(np.eye(n)) - 1.0) <= 1e-12


def test_operator_norm_diagonal():
    assert abs(operator_norm(np.diag([2.0, -3.0j])) - 3.0) <= 1e-12


def test_operator_norm_against_power_iteration():
    rng = np.random.default_rng(7)
    a = random_complex(rng, 6)
    gram = a.conj().T @ a
    v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(20000):
        w = gram @ v
        lam = float(np.real(np.vdot(v, w)))
        if np.linalg.norm(w - lam * v) <= 1e-12 * lam:
            break
        v = w / np.linalg.norm(w)
    oracle = math.sqrt(lam)
    assert abs(operator_norm(a) - oracle) <= 1e-10 * oracle


# ---------------------------------------------------------------- schatten_norm


def test_schatten_identity_p2():
    assert abs(schatten_norm(np.eye(2), 2) - math.sqrt(2)) <= 1e-12


def test_schatten_trace_norm():
    assert abs(schatten_norm(np.diag([3.0, 4.0]), 1) - 7.0) <= 1e-12


def test_schatten_against_eigen_oracle():
    # Oracle: sum of eigenvalues of (a* a)^{3/2} via the eigensolver.
    rng = np.random.default_rng(8)
    a = random_complex(rng, 5)
    gram_vals = hermitian_eig(a.conj().T @ a).eigenvalues
    oracle = float(np.sum(np.clip(gram_vals, 0, None) ** 1.5)) ** (1 / 3)
    assert abs(schatten_norm(a, 3) - oracle) <= 1e-10 * (1 + oracle)


def test_schatten_rejects_small_p():
    with pytest.raises(MatrixError):
        schatten_norm(np.eye(2), 0.5)


def test_schatten_monotone_in_p_and_dominates_opnorm():
    rng = np.random.default_rng(9)
    a = random_complex(rng, 6)
    ps = [1.0, 1.5, 2.0, 3.0, 10.0]
    norms = [schatten_norm(a, p) for p in ps]
    for lo, hi in zip(norms, norms[1:]):
        assert lo >= hi - 1e-9
    for v in norms:
        assert v >= operator_norm(a) - 1e-9


# ---------------------------------------------------------------- mat_exp_hermitian


def test_exp_zero_matrix():
    for t in (0.0, 1.0, -3.7):
        assert np.allclose(mat_exp_hermitian(np.zeros((3, 3)), t), np.eye(3), atol=1e-13)


def test_exp_pi():
    out = mat_exp_hermitian(np.diag([math.pi]), 1.0)
    assert abs(out[0, 0] + 1.0) <= 1e-12


def test_exp_against_taylor_oracle():
    rng = np.random.default_rng(10)
    a = random_hermitian(rng, 6)
    a *= 2.0 / operator_norm(a)
    t = 0.7
    term = np.eye(6, dtype=complex)
    oracle = np.eye(6, dtype=complex)
    for k in range(1, 41):
        term = term @ (1j * t * a) / k
        oracle = oracle + term
    # Taylor remainder beyond k=40 for ||t a|| <= 1.4 is far below 1e-13
    assert operator_norm(mat_exp_hermitian(a, t) - oracle) <= 1e-11


def test_exp_unitary_and_group_law():
    rng = np.random.default_rng(11)
    a = random_hermitian(rng, 5)
    s, t = 0.6, -1.3
    es, et, est = (mat_exp_hermitian(a, x) for x in (s, t, s + t))
    assert abs(operator_norm(es) - 1.0) <= 1e-9
    assert operator_norm(est - es @ et) <= 1e-9


def test_exp_rejects_non_hermitian():
    with pytest.raises(MatrixError):
        mat_exp_hermitian(np.array([[0, 1], [0, 0]], dtype=complex), 1.0)


# ---------------------------------------------------------------- invariants


def test_submultiplicativity_and_cstar_identity():
    rng = np.random.default_rng(12)
    for _ in range(10):
        a, b = random_complex(rng, 4), random_complex(rng, 4)
        na, nb, nab = operator_norm(a), operator_norm(b), operator_norm(a @ b)
        assert nab <= na * nb + 1e-9
        nsq = operator_norm(adjoint(a) @ a)
        assert abs(nsq - na**2) <= 1e-9 * (1 + na**2)


def test_singular_values_clamped_nonnegative():
    assert np.all(singular_values(np.zeros((4, 4))) == 0.0)


# ---------------------------------------------------------------- JSON


def test_matrix_json_round_trip():
    rng = np.random.default_rng(13)
    a = random_complex(rng, 3)
    b = matrix_from_json(matrix_to_json(a))
    assert np.array_equal(a, b)


def test_matrix_json_rejects_nan():
    bad = {"dim": 1, "entries": [[float("nan"), 0.0]]}
    with pytest.raises(MatrixError):
        matrix_from_json(bad)
    bad = {"dim": 1, "entries": [[0.0, float("inf")]]}
    with pytest.raises(MatrixError):
        matrix_from_json(bad)


def test_matrix_json_rejects_wrong_length():
    with pytest.raises(MatrixError):
        matrix_from_json({"dim": 2, "entries": [[1.0, 0.0]]})
