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

import logging
from dataclasses import replace
from fractions import Fraction

import numpy as np

if __package__:
    from ..decoders import DecodeStatus
    from ..decoders import exhaustive_coset_search
    from ..decoders import ml_syndrome_decode
    from ..ensembles import GallagerRegularConfig
    from ..ensembles import sample_gallager_regular
    from ..exceptions import InstanceTooLarge
    from ..gf2 import SparseBinaryMatrix
    from ..gf2 import identity
    from ..gf2 import mat_vec_mul
    from ..models import BernoulliSource
    from ..models import sample_labels
    from ..scheme import QueryScheme
    from ..scheme import TrialOutcome
    from ..scheme import Variant
    from ..scheme import failure
    from ..utils import make_rng
    from .budget import BudgetReport
    from .budget import budget_noiseless
    from .budget import row_weight_bound
else:
    from xorquery.decoders import DecodeStatus
    from xorquery.decoders import exhaustive_coset_search
    from xorquery.decoders import ml_syndrome_decode
    from xorquery.ensembles import GallagerRegularConfig
    from xorquery.ensembles import sample_gallager_regular
    from xorquery.exceptions import InstanceTooLarge
    from xorquery.gf2 import SparseBinaryMatrix
    from xorquery.gf2 import identity
    from xorquery.gf2 import mat_vec_mul
    from xorquery.models import BernoulliSource
    from xorquery.models import sample_labels
    from xorquery.scheme import QueryScheme
    from xorquery.scheme import TrialOutcome
    from xorquery.scheme import Variant
    from xorquery.scheme import failure
    from xorquery.utils import make_rng
    from xorquery.schemes.budget import BudgetReport
    from xorquery.schemes.budget import budget_noiseless
    from xorquery.schemes.budget import row_weight_bound


def query_weight(n, m, delta):
    """Return the row weight of an m x n compression matrix.

    Queries hold min(delta, n - 1) items, so the rows over a group no larger
    than delta stay distinct and independent. With at least as many queries
    as items, or nothing to XOR, every query holds a single item.
    """
    if m >= n:
        return 1
    weight = min(delta, n - 1)
    return weight if weight >= 2 else 1


def compression_matrix(n, m, delta, rng, compression="gallager"):
    """Sample the m x n compression matrix of a noiseless scheme.

    Rows have weight query_weight(n, m, delta).

    :n: Number of items.
    :m: Number of queries.
    :delta: Items per query.
    :rng: A numpy Generator.
    :compression: "gallager" for a regular matrix, "identity" for the
        uncoded n x n baseline.
    """
    if compression == "identity":
        return identity(n)
    weight = query_weight(n, m, delta)
    if weight == 1:
        return SparseBinaryMatrix(m, n, [(i % n,) for i in range(m)])
    return sample_gallager_regular(GallagerRegularConfig(n, m, weight), rng)


def decode_labels(H, s, p, cfg):
    """ML-decode labels from a syndrome, complementing when p > 0.5.

    :return: The DecodeResult, with the estimate in the original polarity.
    """
    flipped = p > 0.5
    prior = 1 - p if flipped else p
    target = s
    if flipped:
        # x' = x + 1 has syndrome s + H 1
        target = s ^ (H.row_weights() & 1).astype(np.uint8)
    result = ml_syndrome_decode(H, target, prior, cfg.ml_cap, cfg.typical,
                                cfg.exponent)
    if flipped and result.recovered:
        return type(result)(result.status, result.estimate ^ 1,
                            result.coset_min_weight)
    return result


def oracle_agrees(H, s, result):
    """Return True iff the decoder agrees with exhaustive coset enumeration."""
    weight, lightest = exhaustive_coset_search(H, s)
    if weight is None:
        return result.status is DecodeStatus.INCONSISTENT
    if result.coset_min_weight != weight:
        return False
    if len(lightest) == 1:
        return result.recovered and np.array_equal(result.estimate, lightest[0])
    return result.status is DecodeStatus.AMBIGUOUS


class NoiselessScheme(QueryScheme):
    """Sparse regular queries answered without errors, decoded by ML."""

    variant = Variant.NOISELESS_LDPC

    def __init__(self, cfg):
        super().__init__(cfg)
        self.source = BernoulliSource(cfg.n, cfg.p)
        if cfg.n > cfg.ml_cap:
            raise InstanceTooLarge(
                f"{cfg.n} items exceed the ML decoding cap of {cfg.ml_cap}")
        self.report = self._budget()
        if cfg.k1 is not None and cfg.k2 is not None:
            logging.info(f"Row weight bound for p={cfg.p}, eps={cfg.epsilon}: "
                         f"{row_weight_bound(cfg.p, cfg.epsilon, cfg.k1, cfg.k2):.3f}")

    def _budget(self):
        cfg = self.cfg
        if cfg.compression == "identity":
            return BudgetReport(cfg.n, 1, Fraction(1), "identity")
        report = budget_noiseless(cfg.n, cfg.p, cfg.epsilon)
        if cfg.m is None:
            return replace(report, max_items_per_query=query_weight(
                cfg.n, report.m, cfg.delta))
        return BudgetReport(cfg.m, query_weight(cfg.n, cfg.m, cfg.delta),
                            Fraction(cfg.m, cfg.n), "override",
                            shannon_floor=report.shannon_floor)

    def budget(self):
        return self.report

    def run(self, seed):
        cfg = self.cfg
        rng = make_rng(seed)
        H = compression_matrix(cfg.n, self.report.m, cfg.delta, rng,
                               cfg.compression)
        x = sample_labels(self.source, rng)
        s = mat_vec_mul(H, x)
        result = decode_labels(H, s, cfg.p, cfg)

        observables = {
            "queries": H.rows,
            "max_row_weight": H.max_row_weight,
            "row_weight_ok": H.rows == 0 or
            bool(np.all(H.row_weights() == self.report.max_items_per_query)),
        }
        if result.coset_min_weight is not None:
            observables["coset_min_weight"] = result.coset_min_weight
        if cfg.oracle:
            observables["oracle_agrees"] = oracle_agrees(H, s, result)

        if not result.recovered:
            return failure(result.status.value, **observables)
        if not np.array_equal(result.estimate, x):
            return failure("wrong-estimate", **observables)
        return TrialOutcome(True, None, observables)
