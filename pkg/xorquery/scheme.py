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

import enum
from abc import ABC
from abc import abstractmethod
from dataclasses import dataclass
from dataclasses import field
from dataclasses import fields
from dataclasses import replace

if __package__:
    from .decoders import ML_CAP
    from .ensembles import DEFAULT_REJECTION_CAP
    from .ensembles import DEFAULT_RHO_C
    from .exceptions import InvalidConfig
else:
    from xorquery.decoders import ML_CAP
    from xorquery.ensembles import DEFAULT_REJECTION_CAP
    from xorquery.ensembles import DEFAULT_RHO_C
    from xorquery.exceptions import InvalidConfig


class Variant(enum.Enum):
    PROP1_ENSEMBLE = "prop1"
    NOISELESS_LDPC = "noiseless"
    CONCATENATED_ERASURE = "concatenated"
    TWO_STAGE_CORRELATED = "two-stage"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for variant in cls:
            if value in (variant.value, variant.name):
                return variant
        raise InvalidConfig(f"unknown scheme variant {value!r}, expected one "
                            f"of {', '.join(v.value for v in cls)}")


COMPRESSIONS = ("gallager", "identity")
DECODERS = ("full", "typical")
OUTER_ENSEMBLES = ("filtered", "bernoulli", "identity")


@dataclass(frozen=True)
class SchemeConfig:
    """Parameters of one query scheme.

    :variant: The scheme to run.
    :n: Number of items.
    :p: Probability of a one label.
    :epsilon: Rate slack of the compression budget.
    :epsilon_prime: Concentration slack of the two-stage scheme.
    :margin: Extra slack of the erasure budget over 1 / (1 - r_erase).
    :m: Query-count override; the budget formula is used when None.
    :delta: Items per query (row weight of the compression matrix).
    :compression: Compression matrix, "gallager" or "identity".
    :decoder: "full" searches the whole coset, "typical" only its typical
        members.
    :ml_cap: Largest number of items the ML decoder accepts.
    :k1: Optional channel constant for the row-weight bound report.
    :k2: Optional channel constant for the row-weight bound report.
    :q: P(Y=1 | X=1) of the correlated source.
    :r_flip: P(Y=1 | X=0) of the correlated source.
    :r_erase: Erasure probability of every answer.
    :design_r_erase: Erasure probability the outer code is sized for;
        r_erase when None.
    :outer: Erasure-protection ensemble, "filtered", "bernoulli" or
        "identity".
    :rho_c: rho = rho_c log N / N for the outer ensemble.
    :c_low: Lower density constant; defaults to rho_c.
    :c_high: Upper density constant M; defaults to rho_c.
    :rejection_cap: Attempts granted to the filtered sampler.
    :oracle: Cross-check every ML decode against coset enumeration.
    """
    variant: Variant
    n: int
    p: float
    epsilon: float = 0.1
    epsilon_prime: float = 0.5
    margin: float = 0.05
    m: int = None
    delta: int = 3
    compression: str = "gallager"
    decoder: str = "full"
    ml_cap: int = ML_CAP
    k1: float = None
    k2: float = None
    q: float = None
    r_flip: float = None
    r_erase: float = 0.0
    design_r_erase: float = None
    outer: str = "filtered"
    rho_c: float = DEFAULT_RHO_C
    c_low: float = None
    c_high: float = None
    rejection_cap: int = DEFAULT_REJECTION_CAP
    oracle: bool = False
    exponent: float = field(default=1 / 3, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        if self.n < 1:
            raise InvalidConfig(f"a scheme needs at least one item, got n={self.n}")
        if not 0 < self.epsilon < 1:
            raise InvalidConfig(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.epsilon_prime <= 0:
            raise InvalidConfig(f"epsilon_prime must be positive, got {self.epsilon_prime}")
        if self.margin < 0:
            raise InvalidConfig(f"margin must be non negative, got {self.margin}")
        if self.m is not None and self.m < 0:
            raise InvalidConfig(f"the query count must be non negative, got {self.m}")
        if self.delta < 1:
            raise InvalidConfig(f"delta must be at least 1, got {self.delta}")
        for name in ("r_erase", "design_r_erase"):
            value = getattr(self, name)
            if value is not None and not 0 <= value < 1:
                raise InvalidConfig(f"{name} must lie in [0, 1), got {value}")
        for name, allowed in (("compression", COMPRESSIONS),
                              ("decoder", DECODERS),
                              ("outer", OUTER_ENSEMBLES)):
            if getattr(self, name) not in allowed:
                raise InvalidConfig(f"{name} must be one of {', '.join(allowed)}, "
                                    f"got {getattr(self, name)!r}")
        if self.variant is Variant.TWO_STAGE_CORRELATED and \
                (self.q is None or self.r_flip is None):
            raise InvalidConfig("the two-stage scheme needs source.q and source.r_flip")

    @property
    def typical(self):
        return self.decoder == "typical"

    @property
    def budget_r_erase(self):
        return self.r_erase if self.design_r_erase is None else self.design_r_erase

    def with_value(self, name, value):
        """Return a copy with one parameter replaced.

        :name: A field name, optionally namespaced (e.g. "channel.r_erase").
        :value: The new value.
        """
        key = name.rsplit(".", 1)[-1]
        key = {"M": "c_high"}.get(key, key)
        if key not in {f.name for f in fields(self)}:
            raise InvalidConfig(f"unknown scheme parameter {name!r}")
        if isinstance(value, float) and key in ("n", "m", "delta", "ml_cap") \
                and value.is_integer():
            value = int(value)
        return replace(self, **{key: value})


@dataclass(frozen=True)
class TrialOutcome:
    """The record of a single trial.

    :success: Whether the labels were recovered exactly.
    :reason: The failure reason code, None on success.
    :observables: Auxiliary per-trial values, booleans or numbers.
    """
    success: bool
    reason: str = None
    observables: dict = field(default_factory=dict)


def failure(reason, **observables):
    return TrialOutcome(False, reason, observables)


class QueryScheme(ABC):
    """Query scheme interface."""

    variant = None

    @abstractmethod
    def __init__(self, cfg):
        """Validate the configuration and prepare the scheme.

        :cfg: A SchemeConfig of the matching variant.
        """
        if cfg.variant is not self.variant:
            raise InvalidConfig(f"{type(self).__name__} cannot run the "
                                f"{cfg.variant.value} variant")
        self.cfg = cfg

    @abstractmethod
    def budget(self):
        """Return the BudgetReport of the scheme.

        :return: The BudgetReport with the number of issued queries.
        """
        pass

    @abstractmethod
    def run(self, seed):
        """Run one trial.

        The whole trial transcript is a function of the configuration and
        the seed.

        :seed: An integer seed or a numpy Generator.
        :return: A TrialOutcome.
        """
        pass

    def __str__(self):
        report = self.budget()
        return (f"{self.variant.value} scheme: n={self.cfg.n}, "
                f"p={self.cfg.p:g}, m={report.m}")

