# tests/test_cda_stbc.py
import cmath
import math

import numpy as np
import pytest

from app.core.errors import DimensionMismatchError, InvalidCodeError
from app.services.cda_stbc import (
    CodeVariant,
    build_code,
    encode,
    encode_weighted,
    linearize,
    structured_stats,
    vec,
)
from tests.helpers import bpsk, complex_gaussian

VARIANTS = [CodeVariant.ILL, CodeVariant.FD_ILL]


def test_n1_code_is_the_symbol_itself():
    code, weights = build_code(1, "ILL")
    assert code.k == 1
    np.testing.assert_array_equal(weights.matrices, [[[1.0]]])
    np.testing.assert_array_equal(encode(code, [-1.0]), [[-1.0]])


def test_n2_ill_first_weight_is_identity():
    _, weights = build_code(2, CodeVariant.ILL)
    assert len(weights) == 4
    np.testing.assert_array_equal(weights.matrices[0], np.eye(2))


def test_n2_ill_encode_example():
    code, _ = build_code(2, "ILL")
    x = encode(code, [1, 1, 1, -1])
    np.testing.assert_allclose(x, [[2, 2], [0, 0]], atol=1e-12)


def test_fd_ill_constants():
    code, _ = build_code(3, "FD-ILL")
    assert code.delta == cmath.exp(1j * math.sqrt(5.0))
    assert code.t == cmath.exp(1j)
    assert abs(code.omega_n**3 - 1.0) < 1e-12
    assert code.k == 9


def test_n2_fd_ill_shares_ill_support_with_unit_entries():
    _, ill = build_code(2, "ILL")
    _, fd = build_code(2, "fdill")
    np.testing.assert_array_equal(ill.matrices != 0, fd.matrices != 0)
    nonzero = fd.matrices[fd.matrices != 0]
    np.testing.assert_allclose(np.abs(nonzero), 1.0, atol=1e-12)
    # d_{1,1} sits below the diagonal at (1,0) with t and above it at (0,1) with delta
    code = build_code(2, "FD-ILL")[0]
    a11 = fd.matrices[code.flat_index(1, 1)]
    assert a11[1, 0] == pytest.approx(code.t)
    assert a11[0, 1] == pytest.approx(code.delta * code.omega_n * code.t)


def test_n3_delta_sits_on_strict_upper_triangle():
    code, _ = build_code(3, "FD-ILL")
    d = np.zeros(9)
    d[code.flat_index(2, 0)] = 1.0
    x = encode(code, d)
    assert x[0, 1] == pytest.approx(code.delta)
    assert x[1, 2] == pytest.approx(code.delta)
    assert x[2, 0] == pytest.approx(1.0)


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("n", range(1, 9))
def test_direct_and_weighted_encoding_agree(rng, variant, n):
    code, weights = build_code(n, variant)
    for _ in range(5):
        d = complex_gaussian(rng, code.k)
        np.testing.assert_allclose(
            encode(code, d), encode_weighted(weights, d), rtol=0, atol=1e-10
        )


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("n", range(1, 9))
def test_weights_are_permutation_type(variant, n):
    _, weights = build_code(n, variant)
    for a in weights.matrices:
        support = a != 0
        assert support.sum() == n
        np.testing.assert_array_equal(support.sum(axis=0), 1)
        np.testing.assert_array_equal(support.sum(axis=1), 1)
        np.testing.assert_allclose(np.abs(a[support]), 1.0, atol=1e-12)


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("n", range(1, 9))
def test_column_stack_is_scaled_unitary(variant, n):
    _, weights = build_code(n, variant)
    stack = weights.column_stack
    assert stack.shape == (n * n, n * n)
    gram = stack.conj().T @ stack
    assert np.max(np.abs(gram - n * np.eye(n * n))) < 1e-10


def test_column_stack_columns_are_vec_of_weights():
    _, weights = build_code(3, "FD-ILL")
    for i, a in enumerate(weights.matrices):
        np.testing.assert_array_equal(weights.column_stack[:, i], vec(a))


@pytest.mark.parametrize("n", [1, 2, 5])
def test_unit_scalars_collapse_fd_ill_onto_ill(rng, n):
    ill_code, ill = build_code(n, "ILL")
    fd_code, fd = build_code(n, "FD-ILL", delta=1.0, t=1.0)
    np.testing.assert_array_equal(ill.matrices, fd.matrices)
    d = bpsk(rng, n * n)
    np.testing.assert_array_equal(encode(ill_code, d), encode(fd_code, d))


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("n", [2, 4, 8])
def test_linearization_reconstructs_channel_output(rng, variant, n):
    code, weights = build_code(n, variant)
    worst = 0.0
    for trial in range(100):
        n_r = n + (trial % 2)
        h_c = complex_gaussian(rng, (n_r, n))
        d = bpsk(rng, code.k)
        h_tilde = linearize(code, h_c, weights)
        expected = vec(h_c @ encode(code, d))
        got = h_tilde @ d
        worst = max(worst, np.linalg.norm(expected - got) / np.linalg.norm(got))
    assert worst < 1e-10


def test_linearize_identity_channel_gives_vec_of_weights():
    code, weights = build_code(2, "ILL")
    h_tilde = linearize(code, np.eye(2))
    for i, a in enumerate(weights.matrices):
        np.testing.assert_array_equal(h_tilde[:, i], vec(a))


def test_linearize_n1():
    code, _ = build_code(1, "ILL")
    np.testing.assert_array_equal(linearize(code, [[0.3 - 0.2j]]), [[0.3 - 0.2j]])


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("n,n_r", [(2, 2), (3, 4), (4, 4), (5, 6)])
def test_structured_stats_match_dense_products(rng, variant, n, n_r):
    code, weights = build_code(n, variant)
    h_c = complex_gaussian(rng, (n_r, n))
    y_c = complex_gaussian(rng, (n_r, n))
    h_tilde = linearize(code, h_c, weights)
    hy, hh = structured_stats(code, weights, h_c, y_c)
    np.testing.assert_allclose(hy, h_tilde.conj().T @ vec(y_c), rtol=1e-9, atol=1e-9)
    np.testing.assert_allclose(hh, h_tilde.conj().T @ h_tilde, rtol=1e-9, atol=1e-9)


def test_flat_index_round_trip():
    code, _ = build_code(4, "ILL")
    assert code.flat_index(2, 3) == 11
    assert code.grid_index(11) == (2, 3)


@pytest.mark.parametrize("n", [0, -1])
def test_rejects_non_positive_size(n):
    with pytest.raises(InvalidCodeError):
        build_code(n, "ILL")


def test_rejects_unknown_variant():
    with pytest.raises(InvalidCodeError):
        build_code(2, "perfect")


def test_encode_rejects_length_mismatch():
    code, _ = build_code(2, "ILL")
    with pytest.raises(DimensionMismatchError):
        encode(code, [1, 1, 1])


def test_linearize_rejects_wrong_channel_width():
    code, _ = build_code(3, "ILL")
    with pytest.raises(DimensionMismatchError):
        linearize(code, np.ones((3, 2)))
