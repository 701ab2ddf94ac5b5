# Copyright 2021 The xorquery Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

from pathlib import Path

import numpy as np
import pytest
from pytest import raises

from xorquery.exceptions import DegenerateShape
from xorquery.exceptions import DimensionMismatch
from xorquery.gf2 import ERASED
from xorquery.gf2 import ErasedVector
from xorquery.gf2 import SolveStatus
from xorquery.gf2 import SparseBinaryMatrix
from xorquery.gf2 import bitvector
from xorquery.gf2 import format_matrix
from xorquery.gf2 import identity
from xorquery.gf2 import mat_mul
from xorquery.gf2 import mat_vec_mul
from xorquery.gf2 import null_space
from xorquery.gf2 import pack_rows
from xorquery.gf2 import parse_matrix
from xorquery.gf2 import rank
from xorquery.gf2 import read_matrix
from xorquery.gf2 import row_weight_profile
from xorquery.gf2 import solve
from xorquery.gf2 import unpack_rows
from xorquery.gf2 import write_matrix
from xorquery.gf2 import zeros


FILES = Path(__file__).parent / "files"


def dense(rows):
    return SparseBinaryMatrix.from_dense(np.array(rows, dtype=np.uint8))


def random_matrix(rng, rows, cols, density=0.5):
    return SparseBinaryMatrix.from_dense(rng.random((rows, cols)) < density)


def oracle_rank(rows):
    """Rank by elimination on rows encoded as Python integers."""
    basis = {}
    for row in rows:
        value = int("".join(str(int(b)) for b in row) or "0", 2)
        while value:
            top = value.bit_length() - 1
            if top not in basis:
                basis[top] = value
                break
            value ^= basis[top]
    return len(basis)


# construction
def test_row_supports_are_sorted():
    A = SparseBinaryMatrix(2, 4, [(3, 1), (2,)])
    assert [list(s) for s in A.row_supports()] == [[1, 3], [2]]
    assert A.total_ones == 3
    assert list(A.row_weights()) == [2, 1]


def test_duplicate_index_rejected():
    with raises(ValueError):
        SparseBinaryMatrix(1, 4, [(1, 1)])


def test_column_out_of_range_rejected():
    with raises(ValueError):
        SparseBinaryMatrix(1, 3, [(0, 3)])


def test_row_count_mismatch():
    with raises(DimensionMismatch):
        SparseBinaryMatrix(2, 3, [(0,)])


def test_bitvector_rejects_non_bits():
    with raises(ValueError):
        bitvector([0, 2])


def test_dense_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(50):
        rows, cols = rng.integers(0, 20, size=2)
        matrix = rng.random((rows, cols)) < 0.3
        A = SparseBinaryMatrix.from_dense(matrix)
        assert np.array_equal(A.to_dense(), matrix)
        assert A.transpose().transpose() == A


def test_pack_unpack_across_word_boundaries():
    rng = np.random.default_rng(1)
    for cols in (0, 1, 63, 64, 65, 128, 130):
        matrix = (rng.random((5, cols)) < 0.5).astype(np.uint8)
        words = pack_rows(matrix)
        assert words.dtype == np.uint64
        assert np.array_equal(unpack_rows(words, cols), matrix)


def test_select_rows():
    A = dense([[1, 0, 1], [0, 1, 0], [1, 1, 1]])
    assert A.select_rows([True, False, True]) == dense([[1, 0, 1], [1, 1, 1]])
    assert A.select_rows([False] * 3).rows == 0


# matVecMul
def test_mat_vec_mul_identity():
    assert list(mat_vec_mul(identity(3), [1, 0, 1])) == [1, 0, 1]


def test_mat_vec_mul_hand_example():
    assert list(mat_vec_mul(dense([[1, 1, 0], [0, 1, 1]]), [1, 0, 0])) == [1, 0]


def test_mat_vec_mul_zero_matrix():
    assert list(mat_vec_mul(zeros(2, 3), [1, 1, 1])) == [0, 0]


def test_mat_vec_mul_dimension_mismatch():
    with raises(DimensionMismatch):
        mat_vec_mul(identity(3), [1, 0])


def test_linearity():
    rng = np.random.default_rng(2)
    for _ in range(1000):
        rows, cols = rng.integers(1, 12, size=2)
        A = random_matrix(rng, rows, cols)
        x = rng.integers(0, 2, cols, dtype=np.uint8)
        y = rng.integers(0, 2, cols, dtype=np.uint8)
        assert np.array_equal(mat_vec_mul(A, x ^ y),
                              mat_vec_mul(A, x) ^ mat_vec_mul(A, y))


# matMul
def test_mat_mul_identity_left():
    H = dense([[1, 0, 1], [0, 1, 1]])
    assert mat_mul(identity(2), H) == H


def test_mat_mul_identity_right():
    assert mat_mul(dense([[1, 1]]), identity(2)) == dense([[1, 1]])


def test_mat_mul_hand_example():
    assert mat_mul(dense([[1, 1]]), dense([[1, 0, 1], [0, 1, 1]])) == \
        dense([[1, 1, 0]])


def test_mat_mul_dimension_mismatch():
    with raises(DimensionMismatch):
        mat_mul(identity(2), identity(3))


def test_mat_mul_associates_with_mat_vec_mul():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        a, b, c = rng.integers(1, 16, size=3)
        G = random_matrix(rng, a, b, 0.3)
        H = random_matrix(rng, b, c, 0.3)
        x = rng.integers(0, 2, c, dtype=np.uint8)
        assert np.array_equal(mat_vec_mul(mat_mul(G, H), x),
                              mat_vec_mul(G, mat_vec_mul(H, x)))


def test_mat_mul_large():
    rng = np.random.default_rng(4)
    G = random_matrix(rng, 512, 512, 0.01)
    H = random_matrix(rng, 512, 512, 0.01)
    for _ in range(5):
        x = rng.integers(0, 2, 512, dtype=np.uint8)
        assert np.array_equal(mat_vec_mul(mat_mul(G, H), x),
                              mat_vec_mul(G, mat_vec_mul(H, x)))


# rank
@pytest.mark.parametrize("matrix, expected", [
    (identity(5), 5),
    (zeros(3, 4), 0),
    (dense([[1, 1], [1, 1]]), 1),
    (zeros(0, 3), 0),
])
def test_rank_examples(matrix, expected):
    assert rank(matrix) == expected


def test_rank_matches_oracle_and_transpose():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        rows, cols = rng.integers(1, 65, size=2)
        A = random_matrix(rng, rows, cols, rng.uniform(0.05, 0.6))
        expected = oracle_rank(A.to_dense())
        assert rank(A) == expected
        assert rank(A.transpose()) == expected


# solve
def test_solve_unique():
    solution = solve(identity(3), [0, 1, 1])
    assert solution.status is SolveStatus.UNIQUE
    assert list(solution.x) == [0, 1, 1]


def test_solve_ambiguous():
    solution = solve(dense([[1, 1]]), [1])
    assert solution.status is SolveStatus.AMBIGUOUS
    assert solution.x is None


def test_solve_ambiguous_witness():
    solution = solve(dense([[1, 1]]), [1], witness=True)
    assert solution.status is SolveStatus.AMBIGUOUS
    assert list(solution.x) == [1, 0]


def test_solve_inconsistent():
    assert solve(dense([[1, 0], [1, 0]]), [0, 1]).status is \
        SolveStatus.INCONSISTENT


def test_solve_dimension_mismatch():
    with raises(DimensionMismatch):
        solve(identity(3), [1, 0])


def test_solve_consistent_with_rank():
    rng = np.random.default_rng(6)
    for _ in range(1000):
        rows, cols = rng.integers(1, 14, size=2)
        A = random_matrix(rng, rows, cols)
        b = rng.integers(0, 2, rows, dtype=np.uint8)
        if rng.random() < 0.5:
            b = mat_vec_mul(A, rng.integers(0, 2, cols, dtype=np.uint8))
        solution = solve(A, b, witness=True)
        if solution.status is SolveStatus.INCONSISTENT:
            continue
        assert np.array_equal(mat_vec_mul(A, solution.x), b)
        assert (solution.status is SolveStatus.UNIQUE) == (rank(A) == cols)


def test_null_space():
    rng = np.random.default_rng(7)
    for _ in range(200):
        rows, cols = rng.integers(1, 16, size=2)
        A = random_matrix(rng, rows, cols)
        basis = null_space(A)
        assert basis.shape == (cols - rank(A), cols)
        for vector in basis:
            assert not mat_vec_mul(A, vector).any()
        if len(basis):
            assert oracle_rank(basis) == len(basis)


# rowWeightProfile
def test_profile_identity_padded():
    profile = row_weight_profile(dense([[1, 0, 0, 0], [0, 1, 0, 0]]))
    assert (profile.max_weight, profile.total_ones, profile.density) == (1, 2, 1)


def test_profile_zero_matrix():
    assert row_weight_profile(zeros(1, 3)).density == 0


def test_profile_arithmetic():
    profile = row_weight_profile(SparseBinaryMatrix(2, 4, [(0, 1, 2), (0, 1, 2, 3)]))
    assert (profile.max_weight, profile.total_ones) == (4, 7)
    assert profile.density == 3.5


def test_profile_degenerate_shape():
    with raises(DegenerateShape):
        row_weight_profile(identity(3))
    profile = row_weight_profile(identity(3), strict=False)
    assert profile.density is None
    assert profile.total_ones == 3


# ErasedVector
def test_erased_vector():
    z = ErasedVector([1, 0, 1], [False, True, False])
    assert len(z) == 3
    assert z.erasures == 1
    assert list(z.entries()) == [1, ERASED, 1]
    assert list(z.received()) == [1, 1]


def test_erased_vector_length_mismatch():
    with raises(DimensionMismatch):
        ErasedVector([1, 0], [False])


# text format
def test_format_matrix():
    A = SparseBinaryMatrix(3, 4, [(0, 2), (), (1, 2, 3)])
    assert format_matrix(A) == "3 4\n0 2\n\n1 2 3\n"
    assert parse_matrix(format_matrix(A)) == A


def test_read_matrix_file():
    A = read_matrix(FILES / "small.txt")
    assert (A.rows, A.cols) == (3, 6)
    assert [list(s) for s in A.row_supports()] == [[0, 1, 2], [], [3, 5]]


def test_write_read_round_trip(tmp_path):
    A = random_matrix(np.random.default_rng(8), 20, 30, 0.2)
    path = tmp_path / "A.txt"
    write_matrix(A, path)
    assert read_matrix(path) == A
    assert path.read_bytes() == format_matrix(A).encode("utf-8")


def test_parse_rejects_unsorted_rows():
    with raises(ValueError):
        parse_matrix("1 3\n2 1\n")
