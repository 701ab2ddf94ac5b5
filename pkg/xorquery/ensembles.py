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

"""Random query-matrix ensembles.

Every sampler is a pure function of its configuration and seed.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

if __package__:
    from .exceptions import InvalidConfig
    from .exceptions import RejectionBudgetExceeded
    from .gf2 import SparseBinaryMatrix
    from .gf2 import mat_mul
    from .gf2 import zeros
    from .models import log
    from .utils import make_rng
else:
    from xorquery.exceptions import InvalidConfig
    from xorquery.exceptions import RejectionBudgetExceeded
    from xorquery.gf2 import SparseBinaryMatrix
    from xorquery.gf2 import mat_mul
    from xorquery.gf2 import zeros
    from xorquery.models import log
    from xorquery.utils import make_rng


DEFAULT_RHO_C = 2.0
DEFAULT_REJECTION_CAP = 1000
# Re-draws granted to the Gallager sampler to avoid repeated rows.
DUPLICATE_RETRIES = 20

@dataclass(frozen=True)
class UniformDeltaConfig:
    """m i.i.d. queries, each a uniform delta-subset of the n items."""
    n: int
    m: int
    delta: int

    def __post_init__(self):
        if self.m < 0 or not 1 <= self.delta <= self.n:
            raise InvalidConfig(
                f"uniform ensemble needs 1 <= delta <= n and m >= 0, got "
                f"n={self.n}, m={self.m}, delta={self.delta}")


@dataclass(frozen=True)
class GallagerRegularConfig:
    """m parity rows of weight row_weight over n items."""
    n: int
    m: int
    row_weight: int

    def __post_init__(self):
        if self.m < 0 or not 2 <= self.row_weight <= self.n:
            raise InvalidConfig(
                f"regular ensemble needs 2 <= row weight <= n and m >= 0, "
                f"got n={self.n}, m={self.m}, row weight={self.row_weight}")


def _condition(delta, c_low):
    return (delta - 1) ** 2 * c_low / (delta + 1) > 2


@dataclass(frozen=True)
class LdgmEnsembleConfig:
    """N x K matrices with i.i.d. Ber(rho) entries.

    :N: The codeword length (rows).
    :K: The message length (columns).
    :rho: The probability of a one.
    :c_low: Lower constant m of m log N / N <= rho.
    :c_high: Upper constant M of rho <= M log N / N.
    :heavy_row_factor: delta(m); computed from c_low when omitted.
    :rejection_cap: Attempts granted to the filtered sampler.
    """
    N: int
    K: int
    rho: float
    c_low: float = DEFAULT_RHO_C
    c_high: float = DEFAULT_RHO_C
    heavy_row_factor: float = None
    rejection_cap: int = DEFAULT_REJECTION_CAP

    def __post_init__(self):
        if not 0 <= self.K < self.N:
            raise InvalidConfig(f"LDGM ensemble needs K < N, got N={self.N}, K={self.K}")
        if not 0 <= self.rho <= 1:
            raise InvalidConfig(f"rho must lie in [0, 1], got {self.rho}")
        if self.c_low <= 0 or self.c_high <= 0:
            raise InvalidConfig("c_low and M must be positive")
        if self.rejection_cap < 1:
            raise InvalidConfig("the rejection cap must be at least 1")
        if self.heavy_row_factor is None:
            object.__setattr__(self, "heavy_row_factor",
                               heavy_row_factor(self.c_low))
        elif self.heavy_row_factor <= 1 or \
                not _condition(self.heavy_row_factor, self.c_low):
            raise InvalidConfig(
                f"heavy row factor {self.heavy_row_factor} violates "
                f"(delta - 1)^2 c_low / (delta + 1) > 2 for c_low={self.c_low}")

    @classmethod
    def for_size(cls, N, K, rho_c=DEFAULT_RHO_C, c_low=None, c_high=None,
                 rejection_cap=DEFAULT_REJECTION_CAP):
        """Build the configuration with rho = rho_c log N / N."""
        rho = min(1.0, rho_c * log(N) / N) if N > 1 else 1.0
        return cls(N=N, K=K, rho=rho,
                   c_low=rho_c if c_low is None else c_low,
                   c_high=rho_c if c_high is None else c_high,
                   rejection_cap=rejection_cap)

    @property
    def heavy_threshold(self):
        """Rows of weight at least this value are heavy."""
        return self.heavy_row_factor * self.c_high * log(self.N)


@dataclass(frozen=True)
class FilteredSample:
    matrix: SparseBinaryMatrix
    rejections: int


def sample_uniform_delta(cfg, seed):
    """Sample m independent queries, each a uniform delta-subset of the items.

    Repeated rows are allowed, as the rows are i.i.d.
    """
    rng = make_rng(seed)
    if cfg.m == 0:
        return zeros(0, cfg.n)
    keys = rng.random((cfg.m, cfg.n))
    supports = np.sort(np.argpartition(keys, cfg.delta - 1, axis=1)[:, :cfg.delta],
                       axis=1)
    indptr = np.arange(cfg.m + 1) * cfg.delta
    return SparseBinaryMatrix.from_csr(cfg.m, cfg.n, indptr, supports.ravel())


def _balanced_rows(n, m, delta, rng):
    """Chop a pool of concatenated column permutations into rows.

    Duplicates inside a row are swapped with pool entries of other rows, which
    keeps the column multiset (and therefore the column balance) intact.
    """
    copies = -(-m * delta // n)
    pool = np.concatenate([rng.permutation(n) for _ in range(copies)] or
                          [np.zeros(0, dtype=np.int64)])
    rows = pool[:m * delta].reshape(m, delta).copy()

    for i in range(m):
        for j in range(delta):
            value = rows[i, j]
            if np.count_nonzero(rows[i] == value) == 1:
                continue
            if not _swap_out(rows, i, j):
                raise InvalidConfig(
                    f"cannot build a regular {m}x{n} matrix of row weight {delta}")
    return rows


def _swap_out(rows, i, j):
    value = rows[i, j]
    current = set(rows[i].tolist())
    m, delta = rows.shape
    for k in list(range(i + 1, m)) + list(range(i)):
        for l in range(delta):
            candidate = rows[k, l]
            if candidate in current:
                continue
            # rows before i are final and must stay duplicate free
            if k < i and value in rows[k]:
                continue
            rows[i, j], rows[k, l] = candidate, value
            return True
    return False


def sample_gallager_regular(cfg, seed):
    """Sample a row-regular parity-check matrix with balanced columns.

    Every row has weight exactly ``row_weight`` and the column weights differ
    by at most one. Repeated rows are re-drawn when the number of distinct
    supports allows it.
    """
    rng = make_rng(seed)
    avoidable = cfg.m <= math.comb(cfg.n, cfg.row_weight)
    for attempt in range(DUPLICATE_RETRIES):
        rows = np.sort(_balanced_rows(cfg.n, cfg.m, cfg.row_weight, rng), axis=1)
        if not avoidable or len({tuple(row) for row in rows.tolist()}) == cfg.m:
            break
        logging.debug(f"Regular {cfg.m}x{cfg.n} draw {attempt} repeats a row")
    indptr = np.arange(cfg.m + 1) * cfg.row_weight
    return SparseBinaryMatrix.from_csr(cfg.m, cfg.n, indptr, rows.ravel())


def sample_bernoulli_ldgm(cfg, seed):
    """Sample an N x K matrix with i.i.d. Ber(rho) entries."""
    rng = make_rng(seed)
    return SparseBinaryMatrix.from_dense(rng.random((cfg.N, cfg.K)) < cfg.rho)


def sample_filtered_ldgm(cfg, seed):
    """Sample the Bernoulli ensemble conditioned on having no heavy row.

    Matrices holding a row of weight at least ``cfg.heavy_threshold`` are
    rejected and re-drawn.

    :cfg: An LdgmEnsembleConfig.
    :seed: An integer seed or a numpy Generator.
    :return: A FilteredSample with the accepted matrix and the rejection count.
    """
    rng = make_rng(seed)
    threshold = cfg.heavy_threshold
    for attempt in range(cfg.rejection_cap):
        matrix = sample_bernoulli_ldgm(cfg, rng)
        if matrix.max_row_weight < threshold:
            return FilteredSample(matrix, attempt)
        logging.debug(f"Rejected {cfg.N}x{cfg.K} matrix with row weight "
                      f"{matrix.max_row_weight} >= {threshold:.3f}")
    raise RejectionBudgetExceeded(
        f"no light {cfg.N}x{cfg.K} matrix within {cfg.rejection_cap} attempts")


def heavy_row_factor(c_low):
    """Return the smallest delta on a 1e-3 grid with (delta-1)^2 c_low/(delta+1) > 2.

    The boundary is the larger root of c d^2 - (2c + 2) d + (c - 2) = 0,
    i.e. d* = (c + 1 + sqrt(4c + 1)) / c.
    """
    if c_low <= 0:
        raise InvalidConfig(f"c_low must be positive, got {c_low}")
    root = (c_low + 1 + math.sqrt(4 * c_low + 1)) / c_low
    k = max(1001, math.floor(root * 1000) + 1)
    while k > 1001 and _condition((k - 1) / 1000, c_low):
        k -= 1
    while not _condition(k / 1000, c_low):
        k += 1
    return k / 1000


def heavy_row_probability(cfg):
    """Return the exact probability of a heavy row and its union bound.

    Row weights are i.i.d. Bin(K, rho), so with q = Pr[Bin(K, rho) >= T] the
    probability of at least one heavy row is 1 - (1 - q)^N <= N q.

    :cfg: An LdgmEnsembleConfig.
    :return: The pair (p_h, union bound).
    """
    weight = math.ceil(cfg.heavy_threshold)
    q = float(binom.sf(weight - 1, cfg.K, cfg.rho))
    return -math.expm1(cfg.N * math.log1p(-q)) if q < 1 else 1.0, cfg.N * q


def concatenate(G, H):
    """Return the overall query matrix G H of a concatenated scheme.

    The rows of the product never outweigh max row weight(G) * max row
    weight(H).
    """
    product = mat_mul(G, H)
    bound = G.max_row_weight * H.max_row_weight
    if product.max_row_weight > bound:
        raise AssertionError(
            f"product row weight {product.max_row_weight} exceeds {bound}")
    return product
