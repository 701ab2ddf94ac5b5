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
from fractions import Fraction

import numpy as np

if __package__:
    from ..decoders import erasure_decode
    from ..ensembles import LdgmEnsembleConfig
    from ..ensembles import concatenate
    from ..ensembles import sample_bernoulli_ldgm
    from ..ensembles import sample_filtered_ldgm
    from ..gf2 import identity
    from ..gf2 import mat_vec_mul
    from ..models import ErasureChannel
    from ..models import apply_erasure
    from ..models import sample_labels
    from ..scheme import TrialOutcome
    from ..scheme import Variant
    from ..scheme import failure
    from ..utils import make_rng
    from .budget import BudgetReport
    from .budget import budget_erasure
    from .budget import ceil
    from .noiseless import NoiselessScheme
    from .noiseless import compression_matrix
    from .noiseless import decode_labels
else:
    from xorquery.decoders import erasure_decode
    from xorquery.ensembles import LdgmEnsembleConfig
    from xorquery.ensembles import concatenate
    from xorquery.ensembles import sample_bernoulli_ldgm
    from xorquery.ensembles import sample_filtered_ldgm
    from xorquery.gf2 import identity
    from xorquery.gf2 import mat_vec_mul
    from xorquery.models import ErasureChannel
    from xorquery.models import apply_erasure
    from xorquery.models import sample_labels
    from xorquery.scheme import TrialOutcome
    from xorquery.scheme import Variant
    from xorquery.scheme import failure
    from xorquery.utils import make_rng
    from xorquery.schemes.budget import BudgetReport
    from xorquery.schemes.budget import budget_erasure
    from xorquery.schemes.budget import ceil
    from xorquery.schemes.noiseless import NoiselessScheme
    from xorquery.schemes.noiseless import compression_matrix
    from xorquery.schemes.noiseless import decode_labels


class ConcatenatedScheme(NoiselessScheme):
    """Compression H followed by an erasure-protecting outer code G.

    Workers answer the rows of G^SC = G H. The taskmaster first recovers
    Y = H X from the unerased answers, then decodes X from Y.
    """

    variant = Variant.CONCATENATED_ERASURE

    def __init__(self, cfg):
        super().__init__(cfg)
        self.channel = ErasureChannel(cfg.r_erase)
        self.inner = self.report
        self.outer_rows = self._outer_rows()
        rate = Fraction(self.inner.m, self.outer_rows) if self.outer_rows else None
        self.report = BudgetReport(
            self.outer_rows, self.inner.max_items_per_query,
            Fraction(self.outer_rows, cfg.n),
            "identity outer" if cfg.outer == "identity" else
            "n[Hb(p)+eps(1-Hb(p))]/(1-r)(1+margin)",
            shannon_floor=self.inner.shannon_floor, outer_rate=rate)
        design = cfg.budget_r_erase
        if design and rate is not None and rate >= 1 - design:
            logging.warning(f"Outer rate {float(rate):.4f} is not below "
                            f"1 - r_erase = {1 - design:.4f}; erasure "
                            f"recovery will mostly fail")

        self.ldgm = None
        if cfg.outer != "identity" and self.inner.m:
            self.ldgm = LdgmEnsembleConfig.for_size(
                self.outer_rows, self.inner.m, cfg.rho_c, cfg.c_low, cfg.c_high,
                cfg.rejection_cap)

    def _outer_rows(self):
        cfg = self.cfg
        if cfg.outer == "identity" or not self.inner.m:
            return self.inner.m
        if cfg.m is not None or cfg.compression == "identity":
            return ceil(self.inner.m / (1 - cfg.budget_r_erase) * (1 + cfg.margin))
        return budget_erasure(cfg.n, cfg.p, cfg.epsilon, cfg.budget_r_erase,
                              cfg.margin).m

    def _outer_matrix(self, rng):
        if self.ldgm is None:
            return identity(self.inner.m), 0
        if self.cfg.outer == "bernoulli":
            return sample_bernoulli_ldgm(self.ldgm, rng), 0
        sample = sample_filtered_ldgm(self.ldgm, rng)
        return sample.matrix, sample.rejections

    def run(self, seed):
        cfg = self.cfg
        rng = make_rng(seed)
        H = compression_matrix(cfg.n, self.inner.m, cfg.delta, rng,
                               cfg.compression)
        G, rejections = self._outer_matrix(rng)
        x = sample_labels(self.source, rng)
        y = mat_vec_mul(H, x)
        z = apply_erasure(self.channel, mat_vec_mul(G, y), rng)

        # workers see the rows of G H
        overall = concatenate(G, H)
        answers = mat_vec_mul(overall, x)
        kept = ~z.erased
        observables = {
            "queries": overall.rows,
            "outer_rows": G.rows,
            "erasures": z.erasures,
            "rejections": rejections,
            "max_row_weight": overall.max_row_weight,
            "row_weight_ok": overall.max_row_weight <=
            G.max_row_weight * H.max_row_weight,
            "staged_equivalent": bool(
                np.array_equal(answers[kept], z.values[kept])),
        }

        stage_one = erasure_decode(G, z)
        if not stage_one.recovered:
            return failure(f"stage1-{stage_one.status.value}", **observables)
        result = decode_labels(H, stage_one.estimate, cfg.p, cfg)
        if not result.recovered:
            return failure(f"stage2-{result.status.value}", **observables)
        if not np.array_equal(result.estimate, x):
            return failure("wrong-estimate", **observables)
        return TrialOutcome(True, None, observables)
