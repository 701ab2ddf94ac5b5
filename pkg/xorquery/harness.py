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

"""Monte Carlo experiments over query schemes.

Trials may run on several threads, but every trial draws from its own seed
and aggregation follows the trial index, so a result only depends on the
Experiment.
"""

import csv
import enum
import logging
import math
from collections import Counter
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from dataclasses import field
from functools import partial

from scipy.stats import norm

if __package__:
    from .exceptions import DomainError
    from .exceptions import InvalidConfig
    from .scheme import SchemeConfig
    from .scheme import TrialOutcome
    from .schemes import make_scheme
    from .utils import derive_seed
    from .utils import thread_count
else:
    from xorquery.exceptions import DomainError
    from xorquery.exceptions import InvalidConfig
    from xorquery.scheme import SchemeConfig
    from xorquery.scheme import TrialOutcome
    from xorquery.schemes import make_scheme
    from xorquery.utils import derive_seed
    from xorquery.utils import thread_count


CSV_HEADER = ("sweep_param", "sweep_value", "trials", "successes",
              "error_rate", "ci_lo", "ci_hi", "aux_name", "aux_value",
              "reference", "formula_tag")
CONFIDENCE = 0.95

Observation = namedtuple("Observation", "estimate lo hi")
Reference = namedtuple("Reference", "value formula")
Check = namedtuple("Check", "name observed reference direction verdict")


class Verdict(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Experiment:
    """A scheme run for a number of trials at every sweep point.

    :scheme: The SchemeConfig shared by every point.
    :trials: Trials per point.
    :master_seed: The seed every trial seed is derived from.
    :sweep_param: The swept SchemeConfig field, None for a single point.
    :sweep_values: The values of the swept field.
    :paired: Reuse the same trial seeds at every point.
    """
    scheme: SchemeConfig
    trials: int
    master_seed: int = 0
    sweep_param: str = None
    sweep_values: tuple = ()
    paired: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidConfig(f"an experiment needs at least one trial, "
                                f"got {self.trials}")
        if self.sweep_param and not self.sweep_values:
            raise InvalidConfig(f"sweep over {self.sweep_param} has no values")
        object.__setattr__(self, "sweep_values", tuple(self.sweep_values))

    def points(self):
        """Yield (point index, sweep value, SchemeConfig) for every point."""
        if not self.sweep_param:
            yield 0, None, self.scheme
            return
        for index, value in enumerate(self.sweep_values):
            yield index, value, self.scheme.with_value(self.sweep_param, value)


@dataclass
class SweepPoint:
    """Aggregated trials of one sweep point.

    :aux: Mean of every auxiliary observable; booleans become frequencies.
    :aux_counts: (true count, total) of the boolean observables.
    :failures: Failure count per reason code.
    :references: Closed-form references keyed by observable, "error_rate"
        for the primary one.
    """
    param: str
    value: object
    trials: int
    successes: int
    failures: dict = field(default_factory=dict)
    aux: dict = field(default_factory=dict)
    aux_counts: dict = field(default_factory=dict)
    references: dict = field(default_factory=dict)

    @property
    def error_rate(self):
        return (self.trials - self.successes) / self.trials

    @property
    def ci(self):
        return wilson_interval(self.trials - self.successes, self.trials)

    def observation(self, name="error_rate"):
        """Return the estimate and 95% interval of an observable.

        Numeric observables that are not frequencies get a zero-width
        interval.
        """
        if name == "error_rate":
            return Observation(self.error_rate, *self.ci)
        if name == "success_rate":
            return Observation(1 - self.error_rate,
                               *wilson_interval(self.successes, self.trials))
        if name in self.aux_counts:
            k, total = self.aux_counts[name]
            return Observation(k / total, *wilson_interval(k, total))
        if name in self.aux:
            value = self.aux[name]
            return Observation(value, value, value)
        raise KeyError(f"no observable {name!r} at {self.param}={self.value}")


@dataclass
class SweepResult:
    param: str
    points: list = field(default_factory=list)


def wilson_interval(k, n, confidence=CONFIDENCE):
    """Return the Wilson score interval of k successes out of n.

    :return: The pair (lo, hi), (0, 1) when n is zero.
    """
    if n == 0:
        return 0.0, 1.0
    if not 0 <= k <= n:
        raise DomainError(f"{k} successes out of {n} trials")
    z = norm.ppf(0.5 + confidence / 2)
    phat = k / n
    denominator = 1 + z ** 2 / n
    center = (phat + z ** 2 / (2 * n)) / denominator
    half = z * math.sqrt(phat * (1 - phat) / n + z ** 2 / (4 * n ** 2)) / denominator
    lo = 0.0 if k == 0 else min(phat, max(0.0, center - half))
    hi = 1.0 if k == n else max(phat, min(1.0, center + half))
    return lo, hi


def _run_trial(run, seed):
    try:
        return run(seed)
    except Exception as e:
        logging.debug(f"Trial with seed {seed} raised {type(e).__name__}: {e}")
        return TrialOutcome(False, type(e).__name__, {})


def aggregate(param, value, outcomes):
    """Fold the ordered outcomes of one point into a SweepPoint."""
    outcomes = list(outcomes)
    failures = Counter(o.reason or "failure" for o in outcomes if not o.success)
    collected = {}
    for outcome in outcomes:
        for name, observed in outcome.observables.items():
            collected.setdefault(name, []).append(observed)

    aux, aux_counts = {}, {}
    for name in sorted(collected):
        values = collected[name]
        if all(isinstance(v, bool) for v in values):
            aux_counts[name] = (sum(values), len(values))
        aux[name] = math.fsum(values) / len(values)
    return SweepPoint(param, value, len(outcomes),
                      sum(o.success for o in outcomes),
                      dict(sorted(failures.items())), aux, aux_counts)


def run_point(run, param, value, seeds, pool):
    """Run one trial per seed and aggregate them in seed order.

    :run: A callable mapping a seed to a TrialOutcome.
    :param: The swept parameter name.
    :value: The sweep value of the point.
    :seeds: The trial seeds.
    :pool: The executor running the trials.
    :return: A SweepPoint.
    """
    point = aggregate(param, value, pool.map(partial(_run_trial, run), seeds))
    logging.info(f"Point {param}={value}: error rate {point.error_rate:.4f} "
                 f"over {point.trials} trials")
    return point


def trial_seeds(master_seed, point_index, trials):
    return [derive_seed(master_seed, point_index, trial)
            for trial in range(trials)]


def run_experiment(exp, threads=None):
    """Run every trial of an experiment.

    Trial seeds come from (master seed, point index, trial index), the point
    index being 0 everywhere in paired experiments.

    :exp: An Experiment.
    :threads: Worker threads; XORQUERY_THREADS decides when None.
    :return: A SweepResult with one SweepPoint per sweep value.
    """
    result = SweepResult(exp.sweep_param or "")
    with ThreadPoolExecutor(max_workers=threads or thread_count()) as pool:
        for index, value, cfg in exp.points():
            scheme = make_scheme(cfg)
            seeds = trial_seeds(exp.master_seed, 0 if exp.paired else index,
                                exp.trials)
            result.points.append(
                run_point(scheme.run, result.param, value, seeds, pool))
    return result


_DIRECTIONS = {"<=": "<=", "≤": "<=", ">=": ">=", "≥": ">=",
               "~=": "~=", "≈": "~=", "==": "~="}


def _direction(direction):
    try:
        return _DIRECTIONS[direction]
    except KeyError:
        raise InvalidConfig(f"unknown comparison {direction!r}, expected "
                            f"<=, >= or ~=")


def compare_to_bound(observed, reference, direction, tolerance=0.0):
    """Compare an observed interval against a closed-form reference.

    :observed: An Observation, or any sequence ending with (lo, hi).
    :reference: The closed-form value.
    :direction: "<=" when the observable should not exceed the reference,
        ">=" when it should not fall below it, "~=" when the interval
        (widened by the tolerance) should contain it.
    :tolerance: Slack added on the reference side.
    :return: A Verdict.
    """
    lo, hi = observed[-2:]
    direction = _direction(direction)
    if direction == "~=":
        if lo - tolerance <= reference <= hi + tolerance:
            return Verdict.PASS
        return Verdict.FAIL
    if direction == "<=":
        if hi <= reference + tolerance:
            return Verdict.PASS
        if lo > reference + tolerance:
            return Verdict.FAIL
        return Verdict.INCONCLUSIVE
    if lo >= reference - tolerance:
        return Verdict.PASS
    if hi < reference - tolerance:
        return Verdict.FAIL
    return Verdict.INCONCLUSIVE


def trend_check(observations, direction):
    """Check the monotonic trend of a sequence of observations.

    A step against the direction is tolerated while the two intervals
    overlap.

    :observations: Observations in sweep order.
    :direction: "nondecreasing" or "nonincreasing".
    :return: PASS or FAIL; FAIL when fewer than two points are given.
    """
    observations = list(observations)
    if direction not in ("nondecreasing", "nonincreasing"):
        raise InvalidConfig(f"unknown trend direction {direction!r}")
    if len(observations) < 2:
        logging.warning(f"A trend needs at least two points, got {len(observations)}")
        return Verdict.FAIL
    for a, b in zip(observations, observations[1:]):
        if direction == "nonincreasing":
            a, b = b, a
        if b.estimate < a.estimate and b.hi < a.lo:
            return Verdict.FAIL
    return Verdict.PASS


def compare_points(a, b, direction=">"):
    """Compare two observations of paired runs.

    :direction: ">" claims a above b, "<" claims a below b.
    :return: PASS when the intervals are disjoint in the claimed direction,
        FAIL when disjoint the other way, INCONCLUSIVE when they overlap.
    """
    if direction not in (">", "<"):
        raise InvalidConfig(f"unknown point comparison {direction!r}")
    if direction == "<":
        a, b = b, a
    if a.lo > b.hi:
        return Verdict.PASS
    if a.hi < b.lo:
        return Verdict.FAIL
    return Verdict.INCONCLUSIVE


def check_point(point, name, direction, reference, tolerance=0.0):
    """Compare one observable of a SweepPoint and record it as a Check."""
    observed = point.observation(name)
    point.references.setdefault(name, Reference(reference, direction))
    return Check(name, observed, reference, direction,
                 compare_to_bound(observed, reference, direction, tolerance))


def _format(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _parse(text):
    if text == "":
        return None
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


def emit_csv(result, path):
    """Write a SweepResult as CSV, one row per point and observable.

    The first row of a point carries the primary error rate with an empty
    aux_name; one row follows for every auxiliary observable.
    """
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for point in result.points:
            lo, hi = point.ci
            common = [point.param, point.value, point.trials, point.successes,
                      point.error_rate, lo, hi]
            names = [None] + list(point.aux)
            for name in names:
                reference = point.references.get(name or "error_rate")
                row = common + [name, None if name is None else point.aux[name],
                                reference and reference.value,
                                reference and reference.formula]
                writer.writerow([_format(value) for value in row])


def parse_csv(path):
    """Read back a SweepResult written by emit_csv."""
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = tuple(next(reader, ()))
        if header != CSV_HEADER:
            raise ValueError(f"{path} is not a sweep result file")
        result = SweepResult("")
        for row in reader:
            fields = dict(zip(CSV_HEADER, row))
            result.param = fields["sweep_param"]
            if fields["aux_name"] == "":
                point = SweepPoint(fields["sweep_param"],
                                   _parse(fields["sweep_value"]),
                                   int(fields["trials"]),
                                   int(fields["successes"]))
                result.points.append(point)
            name = fields["aux_name"] or "error_rate"
            if fields["aux_name"]:
                point.aux[name] = float(fields["aux_value"])
            if fields["reference"]:
                point.references[name] = Reference(float(fields["reference"]),
                                                   fields["formula_tag"])
    return result
