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

import itertools

import numpy as np
import pytest
from pytest import raises

from xorquery.decoders import DecodeStatus
from xorquery.decoders import TypicalSetParams
from xorquery.decoders import all_zero_column_event
from xorquery.decoders import erasure_decode
from xorquery.decoders import exhaustive_coset_search
from xorquery.decoders import ml_syndrome_decode
from xorquery.decoders import typical_membership
from xorquery.exceptions import DimensionMismatch
from xorquery.exceptions import DomainError
from xorquery.exceptions import InstanceTooLarge
from xorquery.gf2 import ErasedVector
from xorquery.gf2 import SolveStatus
from xorquery.gf2 import SparseBinaryMatrix
from xorquery.gf2 import identity
from xorquery.gf2 import mat_vec_mul
from xorquery.gf2 import null_space
from xorquery.gf2 import solve
from xorquery.gf2 import zeros


def dense(rows):
    return SparseBinaryMatrix.from_dense(np.array(rows, dtype=np.uint8))


def brute_force(A, s):
    """Return the lightest weight and members of the coset by enumeration."""
    members = [x for x in itertools.product((0, 1), repeat=A.cols)
               if np.array_equal(mat_vec_mul(A, x), s)]
    if not members:
        return None, []
    lightest = min(sum(x) for x in members)
    return lightest, [x for x in members if sum(x) == lightest]


# mlSyndromeDecode
def test_identity_recovers_syndrome():
    s = np.array([1, 0, 0, 1, 1], dtype=np.uint8)
    result = ml_syndrome_decode(identity(5), s, 0.3)
    assert result.status is DecodeStatus.RECOVERED
    assert np.array_equal(result.estimate, s)
    assert result.coset_min_weight == 3


def test_hand_example():
    result = ml_syndrome_decode(dense([[1, 1, 0], [0, 1, 1]]), [1, 0], 0.1)
    assert result.recovered
    assert list(result.estimate) == [1, 0, 0]
    assert result.coset_min_weight == 1


def test_tie_is_ambiguous():
    result = ml_syndrome_decode(dense([[1, 1]]), [1], 0.3)
    assert result.status is DecodeStatus.AMBIGUOUS
    assert result.estimate is None
    assert result.coset_min_weight == 1


def test_inconsistent_syndrome():
    result = ml_syndrome_decode(dense([[1, 0], [1, 0]]), [0, 1], 0.3)
    assert result.status is DecodeStatus.INCONSISTENT


def test_no_queries():
    result = ml_syndrome_decode(zeros(0, 4), [], 0.3)
    assert result.recovered
    assert not result.estimate.any()


def test_syndrome_length_mismatch():
    with raises(DimensionMismatch):
        ml_syndrome_decode(identity(3), [1, 0], 0.3)


def test_column_cap():
    with raises(InstanceTooLarge):
        ml_syndrome_decode(zeros(1, 29), [0], 0.3)
    with raises(InstanceTooLarge):
        ml_syndrome_decode(zeros(1, 10), [0], 0.3, cap=8)


@pytest.mark.parametrize("p", [0, -0.1, 0.6, 1, 1.5])
def test_prior_domain(p):
    with raises(DomainError):
        ml_syndrome_decode(identity(3), [1, 0, 0], p)


def test_uniform_prior_accepted():
    result = ml_syndrome_decode(identity(3), [1, 0, 0], 0.5)
    assert result.recovered
    assert result.estimate.tolist() == [1, 0, 0]


def test_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(300):
        n = int(rng.integers(1, 11))
        m = int(rng.integers(0, n + 2))
        A = SparseBinaryMatrix.from_dense(rng.random((m, n)) < 0.4)
        s = mat_vec_mul(A, (rng.random(n) < 0.3).astype(np.uint8))
        lightest, members = brute_force(A, s)
        result = ml_syndrome_decode(A, s, 0.3)
        assert result.coset_min_weight == lightest
        if len(members) == 1:
            assert result.recovered
            assert tuple(result.estimate) == members[0]
        else:
            assert result.status is DecodeStatus.AMBIGUOUS


def test_matches_coset_oracle():
    rng = np.random.default_rng(1)
    for _ in range(100):
        n = int(rng.integers(8, 21))
        m = int(rng.integers(n // 2, n + 1))
        A = SparseBinaryMatrix.from_dense(rng.random((m, n)) < 0.3)
        s = mat_vec_mul(A, (rng.random(n) < 0.2).astype(np.uint8))
        weight, lightest = exhaustive_coset_search(A, s)
        result = ml_syndrome_decode(A, s, 0.2)
        assert result.coset_min_weight == weight
        assert result.recovered == (len(lightest) == 1)
        if result.recovered:
            assert np.array_equal(result.estimate, lightest[0])


def coset_members(A, s):
    """Return every member of {x : A x = s}."""
    solution = solve(A, s, witness=True)
    if solution.status is SolveStatus.INCONSISTENT:
        return np.zeros((0, A.cols), dtype=np.int64)
    basis = null_space(A).astype(np.int64)
    index = np.arange(1 << basis.shape[0], dtype=np.int64)
    coefficients = (index[:, None] >> np.arange(basis.shape[0])) & 1
    return (coefficients @ basis + solution.x) & 1


def test_typical_search_matches_coset_enumeration():
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = int(rng.integers(8, 21))
        m = int(rng.integers(n // 2, n + 1))
        p = float(rng.choice([0.1, 0.2, 0.3, 0.45]))
        A = SparseBinaryMatrix.from_dense(rng.random((m, n)) < 0.3)
        s = mat_vec_mul(A, (rng.random(n) < p).astype(np.uint8))
        members = coset_members(A, s)
        lo, hi = TypicalSetParams(n, p).window("A")
        weights = members.sum(axis=1)
        inside = members[(weights >= np.ceil(lo)) & (weights <= np.floor(hi))]

        result = ml_syndrome_decode(A, s, p, typical=True)
        assert result.coset_min_weight == int(weights.min())
        if len(inside) == 0:
            assert result.status is DecodeStatus.INCONSISTENT
        elif len(inside) > 1:
            assert result.status is DecodeStatus.AMBIGUOUS
        else:
            assert result.recovered
            assert np.array_equal(result.estimate, inside[0])



def test_typical_search():
    # two members of weight 2, both inside the window
    A = dense([[1, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0], [0, 0, 0, 1, 0, 0],
               [0, 0, 0, 0, 1, 0], [0, 0, 0, 0, 0, 1]])
    result = ml_syndrome_decode(A, [1, 1, 1, 0, 0], 0.4, typical=True)
    assert result.status is DecodeStatus.AMBIGUOUS
    result = ml_syndrome_decode(identity(6), [1, 1, 0, 0, 0, 0], 0.4, typical=True)
    assert result.recovered
    assert list(result.estimate) == [1, 1, 0, 0, 0, 0]
    result = ml_syndrome_decode(identity(6), [0] * 6, 0.4, typical=True)
    assert result.status is DecodeStatus.INCONSISTENT


def test_oracle_inconsistent():
    weight, lightest = exhaustive_coset_search(dense([[1, 0], [1, 0]]), [0, 1])
    assert weight is None
    assert lightest.shape == (0, 2)


def test_oracle_limit():
    with raises(InstanceTooLarge):
        exhaustive_coset_search(zeros(1, 12), [0], limit=1 << 10)


# erasureDecode
def test_erasure_identity():
    z = ErasedVector([1, 0, 1], [False] * 3)
    result = erasure_decode(identity(3), z)
    assert result.recovered
    assert list(result.estimate) == [1, 0, 1]


def test_erasure_redundant_row():
    G = dense([[1, 0], [0, 1], [1, 1]])
    z = ErasedVector(mat_vec_mul(G, [1, 1]), [True, False, False])
    result = erasure_decode(G, z)
    assert result.recovered
    assert list(result.estimate) == [1, 1]


def test_erasure_rank_deficient():
    G = dense([[1, 0], [0, 1], [1, 1]])
    z = ErasedVector(mat_vec_mul(G, [1, 0]), [True, True, False])
    assert erasure_decode(G, z).status is DecodeStatus.AMBIGUOUS


def test_erasure_everything_lost():
    z = ErasedVector([0, 0, 0], [True] * 3)
    assert erasure_decode(identity(3), z).status is DecodeStatus.AMBIGUOUS


def test_erasure_length_mismatch():
    with raises(DimensionMismatch):
        erasure_decode(identity(3), ErasedVector([0, 1], [False, False]))


# typical sets
@pytest.fixture(params=[(100, 0.3), (60, 0.1), (1000, 0.45), (7, 0.2)])
def params(request):
    n, p = request.param
    return TypicalSetParams(n, p)


def test_all_zeros_not_typical():
    assert not typical_membership(np.zeros(100, dtype=np.uint8),
                                  TypicalSetParams(100, 0.3))


def test_expected_weight_is_typical():
    x = np.zeros(100, dtype=np.uint8)
    x[:30] = 1
    assert typical_membership(x, TypicalSetParams(100, 0.3))


def test_inner_set_inside_outer_set(params):
    for weight in range(params.n + 1):
        x = np.zeros(params.n, dtype=np.uint8)
        x[:weight] = 1
        if typical_membership(x, params, "B"):
            assert typical_membership(x, params, "A")
        y = x.copy()
        y[0] ^= 1
        if typical_membership(x, params, "B"):
            assert typical_membership(y, params, "A")


@pytest.mark.parametrize("p", [0.05, 0.2, 0.3, 0.45])
def test_shift_stays_typical_both_ways(p):
    for n in range(1, 21):
        params = TypicalSetParams(n, p)
        for weight in range(n + 1):
            x = np.zeros(n, dtype=np.uint8)
            x[:weight] = 1
            if not typical_membership(x, params, "B"):
                continue
            for i in range(n):
                y = x.copy()
                y[i] ^= 1
                assert typical_membership(y, params, "A")


def test_shift_stays_typical_exhaustive():
    for n in range(1, 11):
        params = TypicalSetParams(n, 0.3)
        for bits in itertools.product((0, 1), repeat=n):
            x = np.array(bits, dtype=np.uint8)
            if not typical_membership(x, params, "B"):
                continue
            for i in range(n):
                y = x.copy()
                y[i] ^= 1
                assert typical_membership(y, params, "A")



def test_membership_length_mismatch():
    with raises(DimensionMismatch):
        typical_membership([0, 1], TypicalSetParams(3, 0.3))


def test_unknown_set():
    with raises(ValueError):
        TypicalSetParams(10, 0.3).window("C")


# allZeroColumnEvent
def test_identity_has_no_orphans():
    assert all_zero_column_event(identity(4)) == (False, [])


def test_zero_matrix_orphans_everything():
    assert all_zero_column_event(zeros(2, 3)) == (True, [0, 1, 2])


def test_orphan_inspection():
    assert all_zero_column_event(dense([[1, 1, 0], [0, 1, 0]])).indices == [2]


def test_orphaned_one_is_never_recovered():
    rng = np.random.default_rng(9)
    for _ in range(1000):
        n = int(rng.integers(2, 17))
        m = int(rng.integers(1, n + 1))
        dense_rows = (rng.random((m, n)) < 0.4).astype(np.uint8)
        orphan = int(rng.integers(n))
        dense_rows[:, orphan] = 0
        A = SparseBinaryMatrix.from_dense(dense_rows)
        assert orphan in all_zero_column_event(A).indices

        x = (rng.random(n) < 0.3).astype(np.uint8)
        x[orphan] = 1
        result = ml_syndrome_decode(A, mat_vec_mul(A, x), 0.3)
        # x + e_orphan answers the same queries with one label less
        assert result.coset_min_weight < int(x.sum())
        assert not (result.recovered and np.array_equal(result.estimate, x))
        if result.recovered:
            assert result.estimate[orphan] == 0

