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

"""Label sources, the worker erasure channel and closed-form quantities."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import entr

if __package__:
    from .exceptions import DomainError
    from .gf2 import ErasedVector
    from .utils import make_rng
else:
    from xorquery.exceptions import DomainError
    from xorquery.gf2 import ErasedVector
    from xorquery.utils import make_rng


# Base of every logarithm in budgets, thresholds and entropies.
LOG_BASE = 2.0


def log(x):
    return math.log(x, LOG_BASE)


@dataclass(frozen=True)
class BernoulliSource:
    """n i.i.d. Ber(p) labels, with p in (0, 0.5)."""
    n: int
    p: float

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"number of items must be non negative: {self.n}")
        if not 0 < self.p < 0.5:
            raise DomainError(f"p must lie in (0, 0.5), got {self.p}")


@dataclass(frozen=True)
class CorrelatedPairSource:
    """Pairs (X_i, Y_i) with X ~ Ber(p), P(Y=1|X=1) = q, P(Y=1|X=0) = r_flip."""
    n: int
    p: float
    q: float
    r_flip: float

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"number of items must be non negative: {self.n}")
        if not 0 < self.p < 0.5:
            raise DomainError(f"p must lie in (0, 0.5), got {self.p}")
        for name in ("q", "r_flip"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise DomainError(f"{name} must lie in [0, 1], got {value}")

    def joint_distribution(self):
        """Return the 2x2 table P(X=x, Y=y) indexed as [x, y]."""
        p, q, r = self.p, self.q, self.r_flip
        return np.array([[(1 - p) * (1 - r), (1 - p) * r],
                         [p * (1 - q), p * q]])


@dataclass(frozen=True)
class ErasureChannel:
    """Every answer is lost independently with probability r_erase."""
    r_erase: float

    def __post_init__(self):
        if not 0 <= self.r_erase < 1:
            raise DomainError(f"r_erase must lie in [0, 1), got {self.r_erase}")


def sample_labels(src, seed):
    """Draw the n labels of a Bernoulli source.

    :src: A BernoulliSource.
    :seed: An integer seed or a numpy Generator.
    :return: A uint8 vector of length n.
    """
    rng = make_rng(seed)
    return (rng.random(src.n) < src.p).astype(np.uint8)


def sample_correlated(src, seed):
    """Draw the label pairs of a correlated source.

    :src: A CorrelatedPairSource.
    :seed: An integer seed or a numpy Generator.
    :return: The pair (x, y) of uint8 vectors.
    """
    rng = make_rng(seed)
    x = rng.random(src.n) < src.p
    u = rng.random(src.n)
    y = np.where(x, u < src.q, u < src.r_flip)
    return x.astype(np.uint8), y.astype(np.uint8)


def apply_erasure(ch, z, seed):
    """Erase every entry of ``z`` independently with probability r_erase.

    Unerased entries are passed through untouched; the channel never flips.

    :ch: An ErasureChannel.
    :z: The answer vector.
    :seed: An integer seed or a numpy Generator.
    :return: An ErasedVector.
    """
    rng = make_rng(seed)
    z = np.asarray(z, dtype=np.uint8)
    erased = rng.random(z.size) < ch.r_erase
    return ErasedVector(z, erased)


def binary_entropy(p):
    """Return H_b(p) in bits, with 0 log 0 = 0."""
    if not 0 <= p <= 1:
        raise DomainError(f"binary entropy is defined on [0, 1], got {p}")
    return float(entr(p) + entr(1 - p)) / math.log(LOG_BASE)


def entropy(probabilities):
    """Return the entropy in bits of a discrete distribution."""
    probabilities = np.asarray(probabilities, dtype=float).ravel()
    if np.any(probabilities < 0) or not math.isclose(probabilities.sum(), 1):
        raise DomainError("not a probability distribution")
    return float(entr(probabilities).sum()) / math.log(LOG_BASE)


def alpha(p, delta):
    """Return alpha = (1 + (1 - 4p(1 - p))^delta) / 2.

    Since 1 - 4p(1 - p) = (1 - 2p)^2, this is the probability that the XOR
    of 2 delta i.i.d. Ber(p) bits is zero.
    """
    if not 0 < p < 0.5:
        raise DomainError(f"p must lie in (0, 0.5), got {p}")
    if delta < 1:
        raise DomainError(f"delta must be at least 1, got {delta}")
    return 0.5 * (1 + (1 - 4 * p * (1 - p)) ** delta)


def joint_entropy(src):
    """Return H(X, Y) = H_b(p) + p H_b(q) + (1 - p) H_b(r_flip)."""
    return (binary_entropy(src.p) + src.p * binary_entropy(src.q)
            + (1 - src.p) * binary_entropy(src.r_flip))


def chernoff_tail_bound(mu, delta_factor):
    """Upper bound on Pr(sum of independent Bernoullis >= (1 + delta) mu).

    :mu: The expected value of the sum.
    :delta_factor: The relative deviation delta > 0.
    :return: exp(-delta^2 mu / (2 + delta)).
    """
    if mu <= 0 or delta_factor <= 0:
        raise DomainError("mu and delta must be positive")
    return math.exp(-delta_factor ** 2 * mu / (2 + delta_factor))
