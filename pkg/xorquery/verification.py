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

"""Pinned acceptance experiments, one per claim of the query schemes.

Each target loads its parameters from ``verify/<target>.cfg`` (overridable
from the command line), runs its experiments and returns the checks with
their verdicts next to the sweep points they were computed from.
"""

import logging
import math
import pathlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from functools import partial

import numpy as np

if __package__:
    from . import config as configuration
    from .ensembles import LdgmEnsembleConfig
    from .ensembles import heavy_row_probability
    from .ensembles import sample_bernoulli_ldgm
    from .ensembles import sample_filtered_ldgm
    from .exceptions import InvalidConfig
    from .gf2 import rank
    from .harness import Check
    from .harness import Observation
    from .harness import Reference
    from .harness import SweepPoint
    from .harness import Verdict
    from .harness import check_point
    from .harness import compare_points
    from .harness import compare_to_bound
    from .harness import run_experiment
    from .harness import run_point
    from .harness import trend_check
    from .harness import trial_seeds
    from .harness import wilson_interval
    from .models import CorrelatedPairSource
    from .models import chernoff_tail_bound
    from .models import entropy
    from .models import joint_entropy
    from .scheme import TrialOutcome
    from .schemes import make_scheme
    from .schemes.budget import finite_error_bound
    from .schemes.budget import orphan_probability
    from .schemes.budget import prop1_lower_bound
    from .utils import make_rng
    from .utils import thread_count
else:
    from xorquery import config as configuration
    from xorquery.ensembles import LdgmEnsembleConfig
    from xorquery.ensembles import heavy_row_probability
    from xorquery.ensembles import sample_bernoulli_ldgm
    from xorquery.ensembles import sample_filtered_ldgm
    from xorquery.exceptions import InvalidConfig
    from xorquery.gf2 import rank
    from xorquery.harness import Check
    from xorquery.harness import Observation
    from xorquery.harness import Reference
    from xorquery.harness import SweepPoint
    from xorquery.harness import Verdict
    from xorquery.harness import check_point
    from xorquery.harness import compare_points
    from xorquery.harness import compare_to_bound
    from xorquery.harness import run_experiment
    from xorquery.harness import run_point
    from xorquery.harness import trend_check
    from xorquery.harness import trial_seeds
    from xorquery.harness import wilson_interval
    from xorquery.models import CorrelatedPairSource
    from xorquery.models import chernoff_tail_bound
    from xorquery.models import entropy
    from xorquery.models import joint_entropy
    from xorquery.scheme import TrialOutcome
    from xorquery.schemes import make_scheme
    from xorquery.schemes.budget import finite_error_bound
    from xorquery.schemes.budget import orphan_probability
    from xorquery.schemes.budget import prop1_lower_bound
    from xorquery.utils import make_rng
    from xorquery.utils import thread_count


VERIFY_DIR = pathlib.Path(__file__).parent / "verify"


@dataclass
class Report:
    """The checks of one verification target and the points behind them."""
    target: str
    checks: list = field(default_factory=list)
    points: list = field(default_factory=list)

    @property
    def verdicts(self):
        return [check.verdict for check in self.checks]


def targets():
    return sorted(path.stem for path in VERIFY_DIR.glob("*.cfg"))


def load_target(target, overrides=()):
    """Return the pinned configuration of a target with overrides applied."""
    path = VERIFY_DIR / f"{target}.cfg"
    if not path.is_file():
        raise InvalidConfig(f"unknown verify target {target!r}, expected one "
                            f"of {', '.join(targets())}")
    return configuration.load_config(path, overrides)


def verify(target, overrides=(), threads=None):
    """Run the acceptance experiment of a target.

    :target: One of prop1, prop2, prop3, prop4-lemma1, thm1.
    :overrides: ``key=value`` strings applied over the pinned parameters.
    :threads: Worker threads; XORQUERY_THREADS decides when None.
    :return: A Report.
    """
    config = load_target(target, overrides)
    report = Report(target)
    logging.info(f"Verifying {target}")
    TARGETS[target](config, report, threads)
    return report


def _sigma(reference, trials):
    return math.sqrt(reference * (1 - reference) / trials)


def _exact(name, value, reference, tolerance):
    verdict = Verdict.PASS if abs(value - reference) <= tolerance else Verdict.FAIL
    return Check(name, Observation(value, value, value), reference, "==", verdict)


def _every_trial(point, name):
    """PASS iff a boolean observable held in every trial of the point."""
    k, total = point.aux_counts.get(name, (0, 0))
    verdict = Verdict.PASS if total and k == total else Verdict.FAIL
    observed = Observation(k / total if total else 0.0,
                           *wilson_interval(k, total))
    point.references.setdefault(name, Reference(1.0, "every trial"))
    return Check(f"{name} in every trial", observed, 1.0, "all", verdict)


def _points_differ(name, a, b, direction):
    verdict = compare_points(a.observation("success_rate"),
                             b.observation("success_rate"), direction)
    return Check(name, a.observation("success_rate"),
                 b.observation("success_rate").estimate, direction, verdict)


def _values(config, key):
    value = configuration.require(config, key)
    return value if isinstance(value, list) else [value]


def _count(config, key, default=None):
    value = config.get(key, default)
    if value is None:
        configuration.require(config, key)
    return configuration.integer(key, value)


def _prop1(config, report, threads):
    exp = configuration.experiment(config)
    cfg = exp.scheme
    orphan = run_experiment(exp, threads).points[0]
    reference = orphan_probability(cfg.n, cfg.delta,
                                   make_scheme(cfg).budget().m)
    report.checks.append(check_point(orphan, "orphan_first", "~=", reference,
                                     _sigma(reference, exp.trials)))
    report.points.append(orphan)

    for p in _values(config, "verify.grid_p"):
        for delta in _values(config, "verify.grid_delta"):
            bound = prop1_lower_bound(p, delta)
            verdict = Verdict.PASS if bound > 0 else Verdict.FAIL
            report.checks.append(Check(f"error floor at p={p:g}, delta={delta}",
                                       Observation(bound, bound, bound), 0.0,
                                       ">", verdict))

    # full ML decoding at its own budget, within the decoder cap
    small_cfg = cfg.with_value("n", _count(config, "verify.small_n")) \
        .with_value("m", None)
    small_exp = replace(exp, scheme=small_cfg,
                        trials=_count(config, "verify.small_trials", 2000))
    small = run_experiment(small_exp, threads).points[0]
    small.param, small.value = "n", small_cfg.n
    bound = finite_error_bound(small_cfg.n, small_cfg.p, small_cfg.delta,
                               make_scheme(small_cfg).budget().m)
    report.checks.append(check_point(small, "ml_error", ">=", bound))
    report.points.append(small)


def _prop2(config, report, threads):
    exp = configuration.experiment(config)
    main = run_experiment(exp, threads).points[0]
    main.param, main.value = "m", make_scheme(exp.scheme).budget().m
    control_m = _count(config, "verify.control_m")
    # same trial seeds as the main run
    control = run_experiment(
        replace(exp, scheme=exp.scheme.with_value("m", control_m)),
        threads).points[0]
    control.param, control.value = "m", control_m

    expected = configuration.require(config, "verify.budget")
    report.checks.append(_exact("noiseless budget", main.value, expected, 0))
    report.checks.append(_exact("queries issued", main.aux["queries"],
                                main.value, 0))
    report.checks.append(_every_trial(main, "row_weight_ok"))
    report.checks.append(_every_trial(main, "oracle_agrees"))
    report.checks.append(_points_differ(
        f"recovery above m={control_m} control", main, control, ">"))
    report.points.extend((main, control))


def _prop3(config, report, threads):
    exp = configuration.experiment(config)
    point = run_experiment(exp, threads).points[0]
    cfg = exp.scheme
    src = CorrelatedPairSource(cfg.n, cfg.p, cfg.q, cfg.r_flip)
    report.checks.append(_exact("H(X,Y) against the joint table",
                                joint_entropy(src),
                                entropy(src.joint_distribution()), 1e-10))
    report.checks.append(_every_trial(point, "within_bound_concentrated"))
    report.checks.append(_every_trial(point, "budget_exact"))
    report.points.append(point)


def _chernoff(config, report):
    rng = make_rng(_count(config, "harness.seed", 0))
    trials = _count(config, "verify.chernoff_trials", 100000)
    size = _count(config, "verify.chernoff_n", 1024)
    for mu in _values(config, "verify.chernoff_mu"):
        for delta in _values(config, "verify.chernoff_delta"):
            # sums of `size` independent Ber(mu / size) variables
            sums = rng.binomial(size, mu / size, trials)
            k = int(np.count_nonzero(sums >= (1 + delta) * mu))
            bound = chernoff_tail_bound(mu, delta)
            point = SweepPoint("mu/delta", f"{mu:g}/{delta:g}", trials, trials - k)
            point.references["error_rate"] = Reference(bound, "exp(-d^2 mu/(2+d))")
            # the frequency itself, not its interval, must stay within 3 sigma
            frequency = point.error_rate
            report.checks.append(Check(
                f"Chernoff tail at mu={mu:g}, delta={delta:g}",
                point.observation(), bound, "<=",
                compare_to_bound((frequency, frequency), bound, "<=",
                                 3 * _sigma(bound, trials))))
            report.points.append(point)


def _heavy_rows(config, report):
    rng = make_rng(_count(config, "harness.seed", 0))
    trials = _count(config, "verify.heavy_trials", 5000)
    observations = []
    for N in _values(config, "verify.heavy_N"):
        cfg = _ldgm(config, N, N // 2)
        heavy = 0
        # row weights of a Bernoulli matrix are i.i.d. Bin(K, rho)
        for chunk in np.array_split(np.arange(trials), max(1, trials * N // 10 ** 6)):
            weights = rng.binomial(cfg.K, cfg.rho, size=(chunk.size, N))
            heavy += int(np.count_nonzero((weights >= cfg.heavy_threshold).any(axis=1)))
        exact, union = heavy_row_probability(cfg)
        point = SweepPoint("N", N, trials, trials - heavy)
        point.references["error_rate"] = Reference(exact, "1-(1-Pr[Bin(K,rho)>=T])^N")
        point.aux["union_bound"] = union
        report.checks.append(Check(
            f"union bound on heavy rows at N={N}", Observation(union, union, union),
            1 / N, "<=", Verdict.PASS if exact <= union <= 1 / N else Verdict.FAIL))
        observations.append(point.observation())
        report.points.append(point)
    report.checks.append(Check("heavy-row probability nonincreasing in N",
                               observations[-1], observations[0].estimate,
                               "trend", trend_check(observations, "nonincreasing")))
    last = report.points[-1]
    report.checks.append(Check(f"heavy-row probability at N={last.value}",
                               observations[-1], 1 / last.value, "<=",
                               compare_to_bound(observations[-1], 1 / last.value, "<=")))


def _ldgm(config, N, K):
    return LdgmEnsembleConfig.for_size(
        N, K, config.get("ensemble.rho_c", 2),
        config.get("ensemble.c_low"), config.get("ensemble.M"),
        _count(config, "ensemble.rejection_cap", 1000))


def _erasure_trial(cfg, r_erase, filtered, seed):
    rng = make_rng(seed)
    if filtered:
        sample = sample_filtered_ldgm(cfg, rng)
        G, rejections = sample.matrix, sample.rejections
    else:
        G, rejections = sample_bernoulli_ldgm(cfg, rng), 0
    kept = rng.random(G.rows) >= r_erase
    success = rank(G.select_rows(kept)) == G.cols
    return TrialOutcome(success, None if success else "rank-deficient",
                        {"rejections": rejections,
                         "heavy": G.max_row_weight >= cfg.heavy_threshold})


def _ldgm_success(config, report, threads):
    trials = _count(config, "verify.ldgm_trials", 500)
    rate = configuration.require(config, "verify.outer_rate")
    r_erase = configuration.require(config, "channel.r_erase")
    seed = _count(config, "harness.seed", 0)
    observations = []
    with ThreadPoolExecutor(max_workers=threads or thread_count()) as pool:
        for index, N in enumerate(_values(config, "verify.ldgm_N")):
            cfg = _ldgm(config, N, round(rate * N))
            seeds = trial_seeds(seed, index, trials)
            for filtered in (True, False):
                point = run_point(
                    partial(_erasure_trial, cfg, r_erase, filtered),
                    "N" if filtered else "N (unfiltered)", N, seeds, pool)
                report.points.append(point)
                if filtered:
                    observations.append(point.observation("success_rate"))
    report.checks.append(Check("filtered LDGM erasure recovery nondecreasing in N",
                               observations[-1], observations[0].estimate,
                               "trend", trend_check(observations, "nondecreasing")))


def _prop4_lemma1(config, report, threads):
    _chernoff(config, report)
    _heavy_rows(config, report)
    _ldgm_success(config, report, threads)


def _thm1(config, report, threads):
    exp = configuration.experiment(config)
    result = run_experiment(exp, threads)
    for point in result.points:
        report.checks.append(_every_trial(point, "staged_equivalent"))
        report.checks.append(_every_trial(point, "row_weight_ok"))
    _, _, first_cfg = next(exp.points())
    budget = make_scheme(first_cfg).budget()
    first = result.points[0]
    report.checks.append(_exact("queries issued", first.aux["queries"], budget.m, 0))
    for a, b in zip(result.points, result.points[1:]):
        report.checks.append(_points_differ(
            f"recovery at {a.param}={a.value} above {b.value}", a, b, ">"))
    report.points.extend(result.points)


TARGETS = {
    "prop1": _prop1,
    "prop2": _prop2,
    "prop3": _prop3,
    "prop4-lemma1": _prop4_lemma1,
    "thm1": _thm1,
}


def exit_status(verdicts):
    """Return 4 on any FAIL, 5 on any INCONCLUSIVE, 0 otherwise."""
    verdicts = list(verdicts)
    if Verdict.FAIL in verdicts:
        return 4
    if Verdict.INCONCLUSIVE in verdicts:
        return 5
    return 0
