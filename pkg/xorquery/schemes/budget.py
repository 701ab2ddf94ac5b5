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

"""Query budgets and row-weight bookkeeping of every scheme.

The o(1) terms of the asymptotic budgets are set to zero and every budget is
rounded up, which keeps each upper bound on the right side.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

if __package__:
    from ..exceptions import DomainError
    from ..models import alpha
    from ..models import binary_entropy
    from ..models import joint_entropy
    from ..models import log
else:
    from xorquery.exceptions import DomainError
    from xorquery.models import alpha
    from xorquery.models import binary_entropy
    from xorquery.models import joint_entropy
    from xorquery.models import log


DEFAULT_MARGIN = 0.05


@dataclass(frozen=True)
class BudgetReport:
    """Query count of a scheme and the formula it comes from.

    :m: The number of queries.
    :max_items_per_query: The largest query size, None when not fixed yet.
    :rate_normalized: m / n as an exact fraction.
    :bound_formula: The provenance tag of m.
    :shannon_floor: n H_b(p), below which no scheme can go.
    :outer_rate: R_c = m_H / m_G of a concatenated scheme.
    :stages: Per-stage counts of a multi-stage scheme.
    :bound: The closed-form upper bound the count is compared against.
    """
    m: int
    max_items_per_query: int = None
    rate_normalized: Fraction = None
    bound_formula: str = ""
    shannon_floor: float = None
    outer_rate: Fraction = None
    stages: tuple = ()
    bound: float = None

    def __post_init__(self):
        if self.m < 0:
            raise DomainError(f"a budget cannot be negative, got {self.m}")


def ceil(value):
    """Round up, ignoring floating point noise below 1e-9."""
    return math.ceil(round(value, 9))


def _check(n, epsilon):
    if n < 1:
        raise DomainError(f"a budget needs at least one item, got n={n}")
    if not 0 <= epsilon <= 1:
        raise DomainError(f"epsilon must lie in [0, 1], got {epsilon}")


def compressed_size(n, theta, epsilon):
    """Return n [H_b(theta) + epsilon (1 - H_b(theta))] before rounding."""
    h = binary_entropy(theta)
    return n * (h + epsilon * (1 - h))


def stage_budget(n, theta, epsilon):
    """Return the queries needed for n Ber(theta) labels.

    Deterministic labels (theta in {0, 1}) and empty groups need none.
    """
    if n == 0 or theta in (0, 1):
        return 0
    return ceil(compressed_size(n, theta, epsilon))


def budget_noiseless(n, p, epsilon, delta=None):
    """Return the budget m = ceil(n [H_b(p) + epsilon (1 - H_b(p))]).

    :n: Number of items.
    :p: Probability of a one label.
    :epsilon: Rate slack in [0, 1].
    :delta: Items per query, reported when known.
    """
    _check(n, epsilon)
    m = ceil(compressed_size(n, p, epsilon))
    return BudgetReport(m, delta, Fraction(m, n), "n[Hb(p)+eps(1-Hb(p))]",
                        shannon_floor=n * binary_entropy(p))


def budget_erasure(n, p, epsilon, r_erase, margin=DEFAULT_MARGIN, delta=None):
    """Return the concatenated budget ceil(n [...] / (1 - r_erase) (1 + margin)).

    The outer rate is measured against the noiseless budget of the inner
    compression.
    """
    _check(n, epsilon)
    if not 0 <= r_erase < 1:
        raise DomainError(f"r_erase must lie in [0, 1), got {r_erase}")
    if margin < 0:
        raise DomainError(f"margin must be non negative, got {margin}")
    inner = budget_noiseless(n, p, epsilon).m
    m = ceil(compressed_size(n, p, epsilon) / (1 - r_erase) * (1 + margin))
    return BudgetReport(m, delta, Fraction(m, n),
                        "n[Hb(p)+eps(1-Hb(p))]/(1-r)(1+margin)",
                        shannon_floor=n * binary_entropy(p),
                        outer_rate=Fraction(inner, m) if m else None)


def budget_two_stage(src, epsilon, n1, n2, delta=None):
    """Return the budget of the two-stage correlated scheme.

    Stage one compresses the n labels X, stage two compresses Y separately
    over the n1 items with X = 1 (prior q) and the n2 items with X = 0
    (prior r_flip).

    :src: A CorrelatedPairSource.
    :epsilon: Rate slack in [0, 1].
    :n1: Items with X = 1.
    :n2: Items with X = 0.
    :return: A BudgetReport whose stages are (m1, m2, m3) and whose bound is
        n (H(X, Y) + 2 epsilon) + 3.
    """
    _check(src.n, epsilon)
    if n1 < 0 or n2 < 0 or n1 + n2 != src.n:
        raise DomainError(f"stage sizes {n1} + {n2} do not add up to n={src.n}")
    stages = (ceil(compressed_size(src.n, src.p, epsilon)),
              stage_budget(n1, src.q, epsilon),
              stage_budget(n2, src.r_flip, epsilon))
    m = sum(stages)
    return BudgetReport(m, delta, Fraction(m, src.n), "n(H(X,Y)+2eps)+3",
                        shannon_floor=src.n * joint_entropy(src),
                        stages=stages,
                        bound=src.n * (joint_entropy(src) + 2 * epsilon) + 3)


def budget_prop1(n, p, delta):
    """Return the uniform-ensemble budget m = ceil(n H_b(p) / log(1 / alpha)).

    The count is not capped; for small delta it exceeds n.
    """
    if n < 1:
        raise DomainError(f"a budget needs at least one item, got n={n}")
    m = ceil(n * binary_entropy(p) / log(1 / alpha(p, delta)))
    return BudgetReport(m, delta, Fraction(m, n), "nHb(p)/log(1/alpha)",
                        shannon_floor=n * binary_entropy(p))


def row_weight_bound(p, epsilon, k1, k2):
    """Return (1 / H_b(p) - 1)(K1 - K2 ln epsilon) / (1 - epsilon).

    The largest row weight of the regular compression ensembles, given the
    channel constants K1 and K2.
    """
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    h = binary_entropy(p)
    if h == 0:
        raise DomainError(f"the row-weight bound is unbounded at p={p}")
    return (1 / h - 1) * (k1 - k2 * math.log(epsilon)) / (1 - epsilon)


def orphan_probability(n, delta, m):
    """Return (1 - delta / n)^m, the chance that one item is never queried."""
    return (1 - delta / n) ** m


def prop1_lower_bound(p, delta, epsilon=0.0, epsilon_prime=0.0):
    """Return (1 - eps)(exp(-delta H_b(p) / log(1 / alpha)) - eps').

    The asymptotic error floor of the uniform ensemble at its budget.
    """
    exponent = delta * binary_entropy(p) / log(1 / alpha(p, delta))
    return (1 - epsilon) * (math.exp(-exponent) - epsilon_prime)


def finite_error_bound(n, p, delta, m):
    """Return p (1 - delta / n)^m.

    ML decoding with ties counted as errors fails whenever the first item is
    never queried and its label is one.
    """
    return p * orphan_probability(n, delta, m)
