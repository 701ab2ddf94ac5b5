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

"""Recovery of labels from query answers.

For Ber(p) labels with p < 0.5 the maximum-likelihood estimate given the
syndrome ``s = A x`` is the minimum-weight member of the coset
{x : A x = s}. Ties are reported as AMBIGUOUS and never broken.
"""

import enum
from collections import namedtuple
from dataclasses import dataclass

import numpy as np

if __package__:
    from .exceptions import DimensionMismatch
    from .exceptions import DomainError
    from .exceptions import InstanceTooLarge
    from .gf2 import SolveStatus
    from .gf2 import hamming_weight
    from .gf2 import null_space
    from .gf2 import row_reduce
    from .gf2 import solve
    from .gf2 import unpack_rows
else:
    from xorquery.exceptions import DimensionMismatch
    from xorquery.exceptions import DomainError
    from xorquery.exceptions import InstanceTooLarge
    from xorquery.gf2 import SolveStatus
    from xorquery.gf2 import hamming_weight
    from xorquery.gf2 import null_space
    from xorquery.gf2 import row_reduce
    from xorquery.gf2 import solve
    from xorquery.gf2 import unpack_rows


# Largest number of columns the exhaustive ML decoder accepts.
ML_CAP = 28
# Largest coset the enumeration oracle walks through.
ORACLE_LIMIT = 1 << 20


class DecodeStatus(enum.Enum):
    RECOVERED = "recovered"
    AMBIGUOUS = "ambiguous"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class DecodeResult:
    """Outcome of a decoder.

    :status: RECOVERED, AMBIGUOUS or INCONSISTENT.
    :estimate: The recovered vector, set iff RECOVERED.
    :coset_min_weight: The smallest weight in the coset, set when the
        syndrome decoder completed its search.
    """
    status: DecodeStatus
    estimate: np.ndarray = None
    coset_min_weight: int = None

    @property
    def recovered(self):
        return self.status is DecodeStatus.RECOVERED


@dataclass(frozen=True)
class TypicalSetParams:
    """Weight windows np(1 -/+ n^-exponent) of the typical sets."""
    n: int
    p: float
    exponent: float = 1 / 3

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"typical sets need n >= 1, got {self.n}")

    def window(self, which="A"):
        """Return the inclusive weight bounds of set A or set B."""
        slack = self.n ** -self.exponent
        lo = max(0.0, self.n * self.p * (1 - slack))
        hi = min(float(self.n), self.n * self.p * (1 + slack))
        if which == "A":
            return lo, hi
        if which == "B":
            return lo + 1, hi - 1
        raise ValueError(f"unknown typical set {which!r}")


OrphanColumns = namedtuple("OrphanColumns", "exists indices")


def typical_membership(x, params, which="A"):
    """Return True iff the weight of ``x`` lies in the window of the set.

    :x: A bit vector of length ``params.n``.
    :params: The TypicalSetParams.
    :which: "A" for the outer window, "B" for the window shrunk by one.
    """
    if len(x) != params.n:
        raise DimensionMismatch(f"vector has length {len(x)}, expected {params.n}")
    lo, hi = params.window(which)
    return lo <= hamming_weight(x) <= hi


def all_zero_column_event(A):
    """Report the columns of ``A`` no query touches.

    An item outside every query can be flipped without changing any answer,
    so its label is unrecoverable.
    """
    indices = np.flatnonzero(A.column_weights() == 0)
    return OrphanColumns(bool(indices.size), indices.tolist())


def _enumerate(masks):
    """Enumerate every vector over the given columns.

    :masks: The reduced syndrome contribution of each column, as integers.
    :return: The syndromes and weights of vectors 0 .. 2^k - 1 (bit j of the
        vector index selects column j).
    """
    index = np.arange(1 << len(masks), dtype=np.int64)
    syndromes = np.zeros(index.size, dtype=np.int64)
    weights = np.zeros(index.size, dtype=np.int64)
    for j, mask in enumerate(masks):
        bit = (index >> j) & 1
        syndromes ^= bit * mask
        weights += bit
    return syndromes, weights


class _RightTable:
    """The right half vectors grouped by (syndrome, weight)."""

    def __init__(self, syndromes, weights, width):
        self.width = width
        self.syndromes = syndromes
        self.weights = weights
        keys = syndromes * (width + 1) + weights
        self.keys, self.first, counts = np.unique(
            keys, return_index=True, return_counts=True)
        self.cumulative = np.concatenate(([0], np.cumsum(counts)))
        self.counts = counts
        key_syndromes = self.keys // (width + 1)
        leading = np.r_[True, key_syndromes[1:] != key_syndromes[:-1]]
        # the first key of a syndrome holds its lightest vectors
        self.lightest_syndromes = key_syndromes[leading]
        self.lightest_weights = self.keys[leading] % (width + 1)
        self.lightest_counts = counts[leading]
        self.lightest_first = self.first[leading]

    def lightest(self, targets):
        """Return (found, weight, count, index) of the lightest match."""
        pos = np.searchsorted(self.lightest_syndromes, targets)
        pos = np.minimum(pos, self.lightest_syndromes.size - 1)
        found = self.lightest_syndromes[pos] == targets
        return (found, self.lightest_weights[pos], self.lightest_counts[pos],
                self.lightest_first[pos])

    def count_between(self, targets, lo, hi):
        """Count matches of weight in [lo, hi] for every target."""
        lo = np.clip(lo, 0, self.width + 1)
        hi = np.clip(hi, -1, self.width)
        start = np.searchsorted(self.keys, targets * (self.width + 1) + lo)
        stop = np.searchsorted(self.keys, targets * (self.width + 1) + hi,
                               side="right")
        return np.where(hi >= lo, self.cumulative[stop] - self.cumulative[start], 0)


def _bits(value, width):
    return [(int(value) >> j) & 1 for j in range(width)]


def ml_syndrome_decode(A, s, p, cap=ML_CAP, typical=False, exponent=1 / 3):
    """Maximum-likelihood decoding of Ber(p) labels from their syndrome.

    The coset {x : A x = s} is searched exhaustively by meeting in the middle:
    the columns are split in two halves, every vector of each half is
    enumerated, and the halves are matched on their reduced syndromes.

    :A: The query matrix, with at most ``cap`` columns.
    :s: The syndrome (answer vector) of length ``A.rows``.
    :p: The label prior, in (0, 0.5].
    :cap: The exhaustive-search cap on the number of columns.
    :typical: Restrict the search to members inside the typical weight
        window; RECOVERED iff exactly one member lies there.
    :exponent: The window exponent of the typical search.
    :return: A DecodeResult.
    """
    if not 0 < p <= 0.5:
        raise DomainError(f"the label prior must lie in (0, 0.5], got {p}")
    if len(s) != A.rows:
        raise DimensionMismatch(
            f"syndrome has length {len(s)}, matrix has {A.rows} rows")
    if A.cols > cap:
        raise InstanceTooLarge(
            f"{A.cols} columns exceed the exhaustive search cap of {cap}")

    reduction = row_reduce(A, s)
    if not reduction.consistent:
        return DecodeResult(DecodeStatus.INCONSISTENT)

    reduced = unpack_rows(reduction.words, A.cols).astype(np.int64)
    weights_of_rows = np.left_shift(1, np.arange(reduction.rank, dtype=np.int64))
    masks = (reduced * weights_of_rows[:, None]).sum(axis=0)
    target = int((reduction.rhs.astype(np.int64) * weights_of_rows).sum())

    half = A.cols // 2
    left_syndromes, left_weights = _enumerate(masks[:half])
    table = _RightTable(*_enumerate(masks[half:]), width=A.cols - half)
    needs = left_syndromes ^ target

    found, right_weights, right_counts, right_first = table.lightest(needs)
    totals = np.where(found, left_weights + right_weights, A.cols + 1)
    min_weight = int(totals.min())
    best = np.flatnonzero(totals == min_weight)
    ties = int(right_counts[best].sum())

    if not typical:
        if ties > 1:
            return DecodeResult(DecodeStatus.AMBIGUOUS, coset_min_weight=min_weight)
        left, right = best[0], right_first[best[0]]
        estimate = np.array(_bits(left, half) + _bits(right, A.cols - half),
                            dtype=np.uint8)
        return DecodeResult(DecodeStatus.RECOVERED, estimate, min_weight)

    lo, hi = TypicalSetParams(A.cols, p, exponent).window("A")
    lo, hi = int(np.ceil(lo)), int(np.floor(hi))
    members = table.count_between(needs, lo - left_weights, hi - left_weights)
    total = int(members.sum())
    if total == 0:
        return DecodeResult(DecodeStatus.INCONSISTENT, coset_min_weight=min_weight)
    if total > 1:
        return DecodeResult(DecodeStatus.AMBIGUOUS, coset_min_weight=min_weight)
    left = int(np.flatnonzero(members)[0])
    right = int(np.flatnonzero(
        (table.syndromes == needs[left])
        & (table.weights >= lo - left_weights[left])
        & (table.weights <= hi - left_weights[left]))[0])
    estimate = np.array(_bits(left, half) + _bits(right, A.cols - half),
                        dtype=np.uint8)
    return DecodeResult(DecodeStatus.RECOVERED, estimate, min_weight)


def exhaustive_coset_search(A, s, limit=ORACLE_LIMIT):
    """Walk the whole coset {x : A x = s} through a kernel basis.

    :A: The query matrix.
    :s: The syndrome.
    :limit: The largest coset size accepted.
    :return: The pair (minimum weight, array of all minimum-weight members),
        or (None, empty array) when the system is inconsistent.
    """
    solution = solve(A, s, witness=True)
    if solution.status is SolveStatus.INCONSISTENT:
        return None, np.zeros((0, A.cols), dtype=np.uint8)
    basis = null_space(A)
    if (1 << basis.shape[0]) > limit:
        raise InstanceTooLarge(f"coset of size 2^{basis.shape[0]} exceeds {limit}")
    index = np.arange(1 << basis.shape[0], dtype=np.int64)
    coefficients = (index[:, None] >> np.arange(basis.shape[0])) & 1
    members = (coefficients @ basis.astype(np.int64) + solution.x) & 1
    weights = members.sum(axis=1)
    lightest = members[weights == weights.min()].astype(np.uint8)
    return int(weights.min()), lightest


def erasure_decode(G, z):
    """Recover the message behind an erased codeword ``z = G y``.

    Only the unerased equations are kept; the message is recovered iff they
    determine it uniquely, which is exact ML decoding over the erasure
    channel.

    :G: The generator matrix.
    :z: An ErasedVector of length ``G.rows``.
    :return: A DecodeResult.
    """
    if len(z) != G.rows:
        raise DimensionMismatch(
            f"answer vector has length {len(z)}, matrix has {G.rows} rows")
    restricted = G.select_rows(~z.erased)
    solution = solve(restricted, z.received())
    if solution.status is SolveStatus.UNIQUE:
        return DecodeResult(DecodeStatus.RECOVERED, solution.x)
    if solution.status is SolveStatus.AMBIGUOUS:
        return DecodeResult(DecodeStatus.AMBIGUOUS)
    return DecodeResult(DecodeStatus.INCONSISTENT)
