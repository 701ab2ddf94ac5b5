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

"""Exact linear algebra over the binary field.

Vectors are one dimensional ``numpy.uint8`` arrays holding zeros and ones.
Matrices are row-sparse: each row stores the ascending column indices of its
ones. Elimination runs on a bit-packed mirror where every row is a sequence of
little-endian 64-bit words, column ``c`` living in bit ``c % 64`` of word
``c // 64``.
"""

import enum
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

if __package__:
    from .exceptions import DegenerateShape
    from .exceptions import DimensionMismatch
else:
    from xorquery.exceptions import DegenerateShape
    from xorquery.exceptions import DimensionMismatch


ERASED = -1

_ONE = np.uint64(1)


def bitvector(bits):
    """Return a read-only GF(2) vector built from an iterable of bits.

    :bits: An iterable of integers in {0, 1}.
    :return: A one dimensional ``numpy.uint8`` array.
    """
    vector = np.array(bits, dtype=np.uint8).reshape(-1)
    if np.any(vector > 1):
        raise ValueError("bit vectors only hold zeros and ones")
    vector.setflags(write=False)
    return vector


def hamming_weight(vector):
    """Return the number of ones in the vector."""
    return int(np.count_nonzero(vector))


def _words(cols):
    return max(1, (cols + 63) // 64)


def pack_rows(dense):
    """Pack a dense 0/1 matrix into rows of little-endian 64-bit words.

    :dense: A two dimensional array of zeros and ones.
    :return: A ``numpy.uint64`` array of shape (rows, ceil(cols / 64)).
    """
    dense = np.asarray(dense, dtype=np.uint8)
    rows, cols = dense.shape
    packed = np.packbits(dense, axis=1, bitorder="little")
    padded = np.zeros((rows, _words(cols) * 8), dtype=np.uint8)
    padded[:, :packed.shape[1]] = packed
    return padded.view("<u8").astype(np.uint64)


def unpack_rows(words, cols):
    """Inverse of :func:`pack_rows`."""
    words = np.ascontiguousarray(words, dtype="<u8")
    as_bytes = words.view(np.uint8).reshape(words.shape[0], words.shape[1] * 8)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :cols]


class SparseBinaryMatrix:
    """A binary matrix stored as the supports of its rows.

    :rows: The number of rows.
    :cols: The number of columns.
    :indptr: Row ``i`` owns ``indices[indptr[i]:indptr[i + 1]]``.
    :indices: The concatenated, strictly increasing row supports.
    """

    def __init__(self, rows, cols, row_supports):
        """Create a matrix from its row supports.

        :param rows: The number of rows.
        :type rows: int
        :param cols: The number of columns.
        :type cols: int
        :param row_supports: One iterable of column indices per row; each
            support is sorted, duplicates are rejected.
        """
        supports = [np.sort(np.asarray(support, dtype=np.int64).reshape(-1))
                    for support in row_supports]
        if len(supports) != rows:
            raise DimensionMismatch(
                f"expected {rows} row supports, got {len(supports)}")
        lengths = [support.size for support in supports]
        indptr = np.concatenate(([0], np.cumsum(lengths, dtype=np.int64)))
        indices = (np.concatenate(supports) if supports
                   else np.zeros(0, dtype=np.int64))
        self._assign(rows, cols, indptr, indices)

    def _assign(self, rows, cols, indptr, indices):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be non negative")
        indptr = np.asarray(indptr, dtype=np.int64)
        indices = np.asarray(indices, dtype=np.int64)
        if indptr.size != rows + 1 or indptr[0] != 0 or indptr[-1] != indices.size:
            raise DimensionMismatch("row pointer does not match the indices")
        if indices.size and (indices.min() < 0 or indices.max() >= cols):
            raise ValueError(f"column index outside [0, {cols})")
        # consecutive entries of the same row must strictly increase
        first = np.zeros(indices.size, dtype=bool)
        first[indptr[:-1][np.diff(indptr) > 0]] = True
        if np.any(np.diff(indices)[~first[1:]] <= 0):
            raise ValueError("row supports must be strictly increasing")

        self.rows = rows
        self.cols = cols
        self.indptr = indptr
        self.indices = indices
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    @classmethod
    def from_csr(cls, rows, cols, indptr, indices):
        """Create a matrix from row pointers and strictly increasing indices."""
        matrix = cls.__new__(cls)
        matrix._assign(rows, cols, np.array(indptr), np.array(indices))
        return matrix

    @classmethod
    def from_dense(cls, dense):
        """Create a matrix from a dense 0/1 array."""
        dense = np.asarray(dense, dtype=np.uint8)
        if dense.ndim != 2:
            raise ValueError("a dense matrix must be two dimensional")
        rows, cols = dense.shape
        row_index, indices = np.nonzero(dense)
        indptr = np.concatenate(
            ([0], np.cumsum(np.bincount(row_index, minlength=rows))))
        return cls.from_csr(rows, cols, indptr, indices)

    @classmethod
    def from_packed(cls, words, cols):
        """Create a matrix from rows packed by :func:`pack_rows`."""
        return cls.from_dense(unpack_rows(np.atleast_2d(words), cols))

    def row_support(self, i):
        """Return the column indices of the ones of row ``i``."""
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def row_supports(self):
        """Yield the support of every row."""
        for i in range(self.rows):
            yield self.row_support(i)

    def row_weights(self):
        return np.diff(self.indptr)

    def column_weights(self):
        return np.bincount(self.indices, minlength=self.cols)[:self.cols]

    @property
    def total_ones(self):
        return int(self.indices.size)

    @property
    def max_row_weight(self):
        return int(self.row_weights().max()) if self.rows else 0

    def to_dense(self):
        dense = np.zeros((self.rows, self.cols), dtype=np.uint8)
        dense[np.repeat(np.arange(self.rows), self.row_weights()),
              self.indices] = 1
        return dense

    def packed(self):
        """Return the bit-packed mirror of the matrix."""
        return pack_rows(self.to_dense())

    def transpose(self):
        return SparseBinaryMatrix.from_dense(self.to_dense().T)

    def select_rows(self, keep):
        """Return the matrix restricted to the rows flagged in ``keep``."""
        keep = np.asarray(keep, dtype=bool)
        weights = self.row_weights()[keep]
        indptr = np.concatenate(([0], np.cumsum(weights)))
        indices = self.indices[np.repeat(keep, self.row_weights())]
        return SparseBinaryMatrix.from_csr(weights.size, self.cols, indptr, indices)

    def __eq__(self, other):
        if not isinstance(other, SparseBinaryMatrix):
            return NotImplemented
        return (self.rows == other.rows and self.cols == other.cols
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __hash__(self):
        return hash((self.rows, self.cols, self.indices.tobytes(),
                     self.indptr.tobytes()))

    def __repr__(self):
        return f"SparseBinaryMatrix({self.rows}x{self.cols}, ones={self.total_ones})"

    def __str__(self):
        return format_matrix(self)


class ErasedVector:
    """An answer vector in which some entries were never returned.

    :values: The answer bits (meaningless where erased).
    :erased: A boolean mask flagging the erased positions.
    """

    def __init__(self, values, erased):
        values = np.asarray(values, dtype=np.uint8)
        erased = np.asarray(erased, dtype=bool)
        if values.shape != erased.shape:
            raise DimensionMismatch("values and erasure mask differ in length")
        self.values = np.where(erased, 0, values).astype(np.uint8)
        self.erased = erased
        self.values.setflags(write=False)
        self.erased.setflags(write=False)

    def __len__(self):
        return int(self.values.size)

    @property
    def erasures(self):
        return int(np.count_nonzero(self.erased))

    def entries(self):
        """Return the entries as int8, erased positions holding ``ERASED``."""
        return np.where(self.erased, ERASED, self.values).astype(np.int8)

    def received(self):
        """Return the unerased answer bits."""
        return self.values[~self.erased]


class SolveStatus(enum.Enum):
    UNIQUE = "unique"
    AMBIGUOUS = "ambiguous"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class Solution:
    """Outcome of :func:`solve`.

    ``x`` is set for UNIQUE systems, and for AMBIGUOUS ones when a witness was
    requested (free variables set to zero).
    """
    status: SolveStatus
    rank: int
    x: np.ndarray = None


@dataclass(frozen=True)
class RowReduction:
    """Reduced row echelon form of a (possibly augmented) system.

    :words: The packed non-zero rows of the reduced matrix, one per pivot.
    :pivots: The pivot column of each of those rows.
    :rhs: The reduced right hand side restricted to the pivot rows.
    :consistent: False when a zero row meets a non-zero right hand side.
    """
    words: np.ndarray
    pivots: tuple
    rhs: np.ndarray
    consistent: bool
    cols: int

    @property
    def rank(self):
        return len(self.pivots)


@dataclass(frozen=True)
class RowWeightProfile:
    max_weight: int
    total_ones: int
    density: Fraction = None


def _eliminate(words, ncols, full=True):
    """Gaussian elimination in place on packed rows.

    The pivot of every column is the lowest-index remaining row holding a one
    there, so the outcome only depends on the input.

    :words: The packed rows, modified in place.
    :ncols: Only the first ``ncols`` columns are eliminated.
    :full: Clear pivot columns above the pivot as well (reduced form).
    :return: The list of pivot columns; pivot ``i`` sits on row ``i``.
    """
    nrows = words.shape[0]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        w = c >> 6
        bit = _ONE << np.uint64(c & 63)
        hits = np.flatnonzero(words[r:, w] & bit)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
        if full:
            targets = np.flatnonzero(words[:, w] & bit)
            targets = targets[targets != r]
        else:
            targets = r + 1 + np.flatnonzero(words[r + 1:, w] & bit)
        if targets.size:
            words[targets] ^= words[r]
        pivots.append(c)
        r += 1
    return pivots


def _augment(A, b):
    dense = A.to_dense()
    if b is not None:
        dense = np.hstack([dense, np.asarray(b, dtype=np.uint8).reshape(-1, 1)])
    return pack_rows(dense)


def row_reduce(A, b=None):
    """Bring ``A`` (or the system ``A x = b``) to reduced row echelon form.

    :A: A SparseBinaryMatrix.
    :b: An optional right hand side of length ``A.rows``.
    :return: A RowReduction.
    """
    if b is not None and len(b) != A.rows:
        raise DimensionMismatch(
            f"right hand side has length {len(b)}, matrix has {A.rows} rows")
    words = _augment(A, b)
    pivots = _eliminate(words, A.cols, full=True)
    rank = len(pivots)

    consistent = True
    rhs = np.zeros(rank, dtype=np.uint8)
    if b is not None:
        w, bit = A.cols >> 6, _ONE << np.uint64(A.cols & 63)
        flags = (words[:, w] & bit) != 0
        consistent = not bool(np.any(flags[rank:]))
        rhs = flags[:rank].astype(np.uint8)
        words = words.copy()
        words[:, w] &= ~bit
    return RowReduction(words=words[:rank], pivots=tuple(pivots), rhs=rhs,
                        consistent=consistent, cols=A.cols)


def rank(A):
    """Return the GF(2) row rank of ``A``."""
    words = _augment(A, None)
    return len(_eliminate(words, A.cols, full=False))


def solve(A, b, witness=False):
    """Solve ``A x = b`` over GF(2).

    :A: A SparseBinaryMatrix.
    :b: The right hand side, of length ``A.rows``.
    :witness: When True, AMBIGUOUS systems also return the particular
        solution whose free variables are zero.
    :return: A Solution.
    """
    reduction = row_reduce(A, b)
    if not reduction.consistent:
        return Solution(SolveStatus.INCONSISTENT, reduction.rank)

    unique = reduction.rank == A.cols
    if not unique and not witness:
        return Solution(SolveStatus.AMBIGUOUS, reduction.rank)

    x = np.zeros(A.cols, dtype=np.uint8)
    x[list(reduction.pivots)] = reduction.rhs
    x.setflags(write=False)
    status = SolveStatus.UNIQUE if unique else SolveStatus.AMBIGUOUS
    return Solution(status, reduction.rank, x)


def null_space(A):
    """Return a basis of the kernel of ``A`` as a dense (k, cols) array."""
    reduction = row_reduce(A)
    reduced = unpack_rows(reduction.words, A.cols)
    pivots = set(reduction.pivots)
    free = [c for c in range(A.cols) if c not in pivots]
    basis = np.zeros((len(free), A.cols), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for row, pivot in enumerate(reduction.pivots):
            if reduced[row, f]:
                basis[k, pivot] = 1
    return basis


def mat_vec_mul(A, x):
    """Return ``A x`` over GF(2)."""
    x = np.asarray(x, dtype=np.uint8).reshape(-1)
    if A.cols != x.size:
        raise DimensionMismatch(
            f"matrix has {A.cols} columns, vector has length {x.size}")
    sums = np.concatenate(([0], np.cumsum(x[A.indices], dtype=np.int64)))
    result = ((sums[A.indptr[1:]] - sums[A.indptr[:-1]]) & 1).astype(np.uint8)
    result.setflags(write=False)
    return result


def mat_mul(G, H):
    """Return the GF(2) product ``G H`` as a SparseBinaryMatrix."""
    if G.cols != H.rows:
        raise DimensionMismatch(
            f"cannot multiply {G.rows}x{G.cols} by {H.rows}x{H.cols}")
    h_words = H.packed()
    product = np.zeros((G.rows, _words(H.cols)), dtype=np.uint64)
    for i in range(G.rows):
        support = G.row_support(i)
        if support.size:
            product[i] = np.bitwise_xor.reduce(h_words[support], axis=0)
    return SparseBinaryMatrix.from_packed(product, H.cols)


def identity(n):
    return SparseBinaryMatrix(n, n, [(i,) for i in range(n)])


def zeros(rows, cols):
    return SparseBinaryMatrix(rows, cols, [()] * rows)


def row_weight_profile(A, strict=True):
    """Return the maximum row weight, the number of ones and the density.

    The density follows the convention that an m x n parity-check matrix
    holds (n - m) * density ones.

    :A: A SparseBinaryMatrix.
    :strict: Raise DegenerateShape when rows >= cols; otherwise return the
        profile with ``density`` set to None.
    :return: A RowWeightProfile.
    """
    density = None
    if A.rows < A.cols:
        density = Fraction(A.total_ones, A.cols - A.rows)
    elif strict:
        raise DegenerateShape(
            f"density is undefined for a {A.rows}x{A.cols} matrix")
    return RowWeightProfile(A.max_row_weight, A.total_ones, density)


def format_matrix(A):
    """Render the matrix in the sparse text format.

    The first line holds "m n", then one line per row lists the ascending
    column indices of its ones (an empty line is a zero row).
    """
    lines = [f"{A.rows} {A.cols}"]
    lines.extend(" ".join(str(int(c)) for c in support)
                 for support in A.row_supports())
    return "\n".join(lines) + "\n"


def parse_matrix(text):
    """Parse the sparse text format produced by :func:`format_matrix`."""
    lines = text.split("\n")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError("invalid matrix header: expected 'm n'")
    rows, cols = (int(token) for token in header)
    body = lines[1:1 + rows]
    body += [""] * (rows - len(body))
    supports = []
    for i, line in enumerate(body):
        support = [int(token) for token in line.split()]
        if any(b <= a for a, b in zip(support, support[1:])):
            raise ValueError(f"row {i} is not strictly increasing")
        supports.append(support)
    return SparseBinaryMatrix(rows, cols, supports)


def write_matrix(A, path):
    with io.open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(format_matrix(A))


def read_matrix(path):
    with io.open(path, "r", encoding="utf-8", newline="\n") as f:
        return parse_matrix(f.read())
