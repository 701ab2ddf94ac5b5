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

from dataclasses import replace
from fractions import Fraction

import numpy as np

if __package__:
    from ..decoders import all_zero_column_event
    from ..ensembles import UniformDeltaConfig
    from ..ensembles import sample_uniform_delta
    from ..gf2 import mat_vec_mul
    from ..models import BernoulliSource
    from ..models import sample_labels
    from ..scheme import QueryScheme
    from ..scheme import TrialOutcome
    from ..scheme import Variant
    from ..scheme import failure
    from ..utils import make_rng
    from .budget import budget_prop1
    from .noiseless import decode_labels
else:
    from xorquery.decoders import all_zero_column_event
    from xorquery.ensembles import UniformDeltaConfig
    from xorquery.ensembles import sample_uniform_delta
    from xorquery.gf2 import mat_vec_mul
    from xorquery.models import BernoulliSource
    from xorquery.models import sample_labels
    from xorquery.scheme import QueryScheme
    from xorquery.scheme import TrialOutcome
    from xorquery.scheme import Variant
    from xorquery.scheme import failure
    from xorquery.utils import make_rng
    from xorquery.schemes.budget import budget_prop1
    from xorquery.schemes.noiseless import decode_labels


class UniformEnsembleScheme(QueryScheme):
    """m i.i.d. queries over uniform delta-subsets of the items.

    Two observables are recorded per trial: whether the first item is left
    out of every query, and (when n is within the ML cap) whether ML decoding
    fails. Above the cap no decoding runs and every trial is reported as
    "undecoded", so only the orphan observables carry information.
    """

    variant = Variant.PROP1_ENSEMBLE

    def __init__(self, cfg):
        super().__init__(cfg)
        self.source = BernoulliSource(cfg.n, cfg.p)
        self.ensemble = UniformDeltaConfig(cfg.n, self.budget().m, cfg.delta)

    def budget(self):
        report = budget_prop1(self.cfg.n, self.cfg.p, self.cfg.delta)
        if self.cfg.m is None:
            return report
        return replace(report, m=self.cfg.m,
                       rate_normalized=Fraction(self.cfg.m, self.cfg.n),
                       bound_formula="override")

    @property
    def decodes(self):
        return self.cfg.n <= self.cfg.ml_cap

    def run(self, seed):
        cfg = self.cfg
        rng = make_rng(seed)
        Q = sample_uniform_delta(self.ensemble, rng)
        x = sample_labels(self.source, rng)
        orphans = all_zero_column_event(Q)
        observables = {
            "queries": Q.rows,
            "orphan_first": 0 in orphans.indices,
            "orphan_any": orphans.exists,
            "decoded": self.decodes,
        }
        if not self.decodes:
            return failure("undecoded", **observables)

        result = decode_labels(Q, mat_vec_mul(Q, x), cfg.p, cfg)
        recovered = result.recovered and np.array_equal(result.estimate, x)
        observables["ml_error"] = not recovered
        if not result.recovered:
            return failure(result.status.value, **observables)
        if not recovered:
            return failure("wrong-estimate", **observables)
        return TrialOutcome(True, None, observables)
