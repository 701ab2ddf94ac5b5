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

"""Two-stage recovery of correlated label pairs.

Stage one recovers X with a noiseless scheme. Stage two is designed after
stage one: the items are split by the recovered X and each part gets its own
noiseless scheme for Y, with prior q on the X = 1 part and r_flip on the
X = 0 part.
"""

from dataclasses import replace
from fractions import Fraction

import numpy as np

if __package__:
    from ..exceptions import InstanceTooLarge
    from ..exceptions import StageOneFailed
    from ..gf2 import mat_vec_mul
    from ..models import CorrelatedPairSource
    from ..models import sample_correlated
    from ..scheme import QueryScheme
    from ..scheme import TrialOutcome
    from ..scheme import Variant
    from ..scheme import failure
    from ..utils import make_rng
    from .budget import budget_two_stage
    from .budget import stage_budget
    from .noiseless import compression_matrix
    from .noiseless import decode_labels
else:
    from xorquery.exceptions import InstanceTooLarge
    from xorquery.exceptions import StageOneFailed
    from xorquery.gf2 import mat_vec_mul
    from xorquery.models import CorrelatedPairSource
    from xorquery.models import sample_correlated
    from xorquery.scheme import QueryScheme
    from xorquery.scheme import TrialOutcome
    from xorquery.scheme import Variant
    from xorquery.scheme import failure
    from xorquery.utils import make_rng
    from xorquery.schemes.budget import budget_two_stage
    from xorquery.schemes.budget import stage_budget
    from xorquery.schemes.noiseless import compression_matrix
    from xorquery.schemes.noiseless import decode_labels


class TwoStageScheme(QueryScheme):
    """Recover (X, Y) pairs, first X, then Y conditioned on the recovered X."""

    variant = Variant.TWO_STAGE_CORRELATED

    def __init__(self, cfg):
        super().__init__(cfg)
        self.source = CorrelatedPairSource(cfg.n, cfg.p, cfg.q, cfg.r_flip)
        if cfg.n > cfg.ml_cap:
            raise InstanceTooLarge(
                f"{cfg.n} items exceed the ML decoding cap of {cfg.ml_cap}")

    def budget(self, n1=None):
        """Return the BudgetReport for a realized stage-one split.

        :n1: Items with X = 1; the expected count round(n p) when omitted.
        """
        if n1 is None:
            n1 = round(self.cfg.n * self.cfg.p)
        report = budget_two_stage(self.source, self.cfg.epsilon, n1,
                                  self.cfg.n - n1, min(self.cfg.delta, self.cfg.n))
        if self.cfg.m is None:
            return report
        stages = (self.cfg.m,) + report.stages[1:]
        return replace(report, m=sum(stages),
                       rate_normalized=Fraction(sum(stages), self.cfg.n),
                       bound_formula="override", stages=stages)

    def recover_x(self, x, rng):
        """Run stage one.

        :return: The pair (estimate of x, queries issued).
        :raises StageOneFailed: When the stage-one decoder does not return a
            unique estimate.
        """
        cfg = self.cfg
        m1 = self.budget(0).stages[0]
        H = compression_matrix(cfg.n, m1, cfg.delta, rng, cfg.compression)
        result = decode_labels(H, mat_vec_mul(H, x), cfg.p, cfg)
        if not result.recovered:
            raise StageOneFailed(f"stage one ended {result.status.value}")
        return result.estimate, H.rows

    def recover_group(self, y, theta, rng):
        """Recover the Y labels of one part of the stage-two split.

        Deterministic parts (theta in {0, 1}) and empty parts take no query.

        :return: The tuple (estimate, queries issued, status or None).
        """
        size = len(y)
        if size == 0 or theta in (0, 1):
            return np.full(size, int(theta), dtype=np.uint8), 0, None
        m = stage_budget(size, theta, self.cfg.epsilon)
        H = compression_matrix(size, m, self.cfg.delta, rng)
        result = decode_labels(H, mat_vec_mul(H, y), theta, self.cfg)
        if not result.recovered:
            return None, H.rows, result.status
        return result.estimate, H.rows, None

    def run(self, seed):
        cfg = self.cfg
        rng = make_rng(seed)
        x, y = sample_correlated(self.source, rng)
        n1 = int(x.sum())
        concentrated = n1 <= cfg.n * cfg.p * (1 + cfg.epsilon_prime)
        observables = {"concentrated": concentrated}

        try:
            x_hat, m1 = self.recover_x(x, rng)
        except StageOneFailed:
            return failure(StageOneFailed.__name__, **observables)

        ones = np.flatnonzero(x_hat)
        zeros = np.flatnonzero(x_hat == 0)
        y_hat = np.zeros(cfg.n, dtype=np.uint8)
        issued = [m1]
        reason = None
        for items, theta in ((ones, cfg.q), (zeros, cfg.r_flip)):
            estimate, queries, status = self.recover_group(y[items], theta, rng)
            issued.append(queries)
            if status is not None:
                reason = reason or f"stage2-{status.value}"
            else:
                y_hat[items] = estimate

        report = self.budget(len(ones))
        total = sum(issued)
        observables.update({
            "queries": total,
            "stage2_queries": total - m1,
            "budget_exact": tuple(issued) == report.stages,
            "within_bound": total <= report.bound,
        })
        if concentrated:
            observables["within_bound_concentrated"] = total <= report.bound
        if reason is not None:
            return failure(reason, **observables)
        if not (np.array_equal(x_hat, x) and np.array_equal(y_hat, y)):
            return failure("wrong-estimate", **observables)
        return TrialOutcome(True, None, observables)
