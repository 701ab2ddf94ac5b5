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

"""Command line entry point.

    xorquery gen-matrix -c gallager.cfg -o H.txt
    xorquery simulate -c noiseless.cfg -o result.csv harness.trials=500
    xorquery sweep -c erasure.cfg -o sweep.csv
    xorquery verify prop1
"""

import argparse
import logging
import sys

import colorama

if __package__:
    from . import config as configuration
    from . import utils
    from . import visualization
    from .ensembles import GallagerRegularConfig
    from .ensembles import LdgmEnsembleConfig
    from .ensembles import UniformDeltaConfig
    from .ensembles import sample_bernoulli_ldgm
    from .ensembles import sample_filtered_ldgm
    from .ensembles import sample_gallager_regular
    from .ensembles import sample_uniform_delta
    from .exceptions import InvalidConfig
    from .exceptions import XorQueryError
    from .gf2 import identity
    from .gf2 import row_weight_profile
    from .gf2 import write_matrix
    from .harness import SweepResult
    from .harness import check_point
    from .harness import emit_csv
    from .harness import run_experiment
    from .schemes import make_scheme
    from .verification import exit_status
    from .verification import targets
    from .verification import verify
else:
    from xorquery import config as configuration
    from xorquery import utils
    from xorquery import visualization
    from xorquery.ensembles import GallagerRegularConfig
    from xorquery.ensembles import LdgmEnsembleConfig
    from xorquery.ensembles import UniformDeltaConfig
    from xorquery.ensembles import sample_bernoulli_ldgm
    from xorquery.ensembles import sample_filtered_ldgm
    from xorquery.ensembles import sample_gallager_regular
    from xorquery.ensembles import sample_uniform_delta
    from xorquery.exceptions import InvalidConfig
    from xorquery.exceptions import XorQueryError
    from xorquery.gf2 import identity
    from xorquery.gf2 import row_weight_profile
    from xorquery.gf2 import write_matrix
    from xorquery.harness import SweepResult
    from xorquery.harness import check_point
    from xorquery.harness import emit_csv
    from xorquery.harness import run_experiment
    from xorquery.schemes import make_scheme
    from xorquery.verification import exit_status
    from xorquery.verification import targets
    from xorquery.verification import verify


EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

ENSEMBLES = ("uniform", "gallager", "bernoulli", "filtered", "identity")


def _count(config, key, default=None):
    value = config.get(key, default)
    if value is None:
        configuration.require(config, key)
    return configuration.integer(key, value)


def sample_matrix(config):
    """Sample the matrix described by a flat gen-matrix configuration.

    :return: The pair (matrix, rejections).
    """
    ensemble = configuration.require(config, "ensemble")
    seed = _count(config, "seed", 0)
    if ensemble not in ENSEMBLES:
        raise InvalidConfig(f"unknown ensemble {ensemble!r}, expected one of "
                            f"{', '.join(ENSEMBLES)}")
    if ensemble == "identity":
        return identity(_count(config, "n")), 0
    if ensemble == "uniform":
        cfg = UniformDeltaConfig(_count(config, "n"), _count(config, "m"),
                                 _count(config, "delta"))
        return sample_uniform_delta(cfg, seed), 0
    if ensemble == "gallager":
        cfg = GallagerRegularConfig(_count(config, "n"), _count(config, "m"),
                                    _count(config, "delta"))
        return sample_gallager_regular(cfg, seed), 0

    cfg = LdgmEnsembleConfig.for_size(
        _count(config, "N"), _count(config, "K"), config.get("rho_c", 2),
        config.get("c_low"), config.get("M"),
        _count(config, "rejection_cap", 1000))
    if ensemble == "bernoulli":
        return sample_bernoulli_ldgm(cfg, seed), 0
    sample = sample_filtered_ldgm(cfg, seed)
    return sample.matrix, sample.rejections


def gen_matrix(args):
    config = configuration.load_config(args.config, args.overrides)
    matrix, rejections = sample_matrix(config)
    write_matrix(matrix, args.output)
    profile = row_weight_profile(matrix, strict=False)
    utils.announce(f"Wrote {matrix.rows}x{matrix.cols} matrix to {args.output}")
    print(visualization.profile_table(matrix, profile))
    if rejections:
        print(f"Rejected matrices: {rejections}")
    return EXIT_OK


def _run(args, sweep):
    config = configuration.load_config(args.config, args.overrides)
    exp = configuration.experiment(config)
    if sweep and not exp.sweep_param:
        raise InvalidConfig("missing required key 'sweep.param'")
    if not sweep and exp.sweep_param:
        raise InvalidConfig("simulate runs a single point; use sweep for "
                            "'sweep.param'")
    specs = configuration.verdict_specs(config)

    result = run_experiment(exp)
    checks = []
    for point in result.points:
        for spec in specs:
            try:
                check = check_point(point, spec.observable, spec.direction,
                                    spec.reference, spec.tolerance)
            except KeyError:
                raise InvalidConfig(f"unknown observable {spec.observable!r} "
                                    f"in verdict.{spec.observable}")
            if point.param:
                check = check._replace(
                    name=f"{spec.observable} at {point.param}={point.value}")
            checks.append(check)
    emit_csv(result, args.output)

    scheme = make_scheme(next(exp.points())[2])
    utils.announce(str(scheme))
    print(visualization.budget_table(scheme.budget()))
    print(visualization.points_table(result.points))
    if any(point.failures for point in result.points):
        print(visualization.failures_table(result.points))
    if checks:
        print(visualization.checks_table(checks))
    return exit_status(check.verdict for check in checks)


def simulate(args):
    return _run(args, sweep=False)


def sweep(args):
    return _run(args, sweep=True)


def verify_target(args):
    report = verify(args.target, args.overrides)
    utils.announce(f"Verification of {report.target}")
    print(visualization.checks_table(report.checks))
    if args.output:
        emit_csv(SweepResult("", report.points), args.output)
    return exit_status(report.verdicts)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="xorquery",
        description="Simulate XOR-query schemes for crowdsourced labeling.")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for debugging output")
    commands = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help, output_required=True, positional=()):
        command = commands.add_parser(name, help=help)
        for argument, description in positional:
            command.add_argument(argument, help=description)
        command.set_defaults(handler=handler)
        command.add_argument("-o", "--output", required=output_required,
                             metavar="FILENAME", help="output file")
        command.add_argument("overrides", nargs="*", metavar="KEY=VALUE",
                             help="configuration overrides")
        return command

    for name, handler, help in (
            ("gen-matrix", gen_matrix, "sample a query matrix"),
            ("simulate", simulate, "run one scheme and write its CSV"),
            ("sweep", sweep, "run a scheme over a parameter sweep")):
        add(name, handler, help).add_argument(
            "-c", "--config", required=True, metavar="FILENAME",
            help="key = value configuration file")

    add("verify", verify_target, "run a pinned acceptance experiment",
        output_required=False,
        positional=[("target", f"one of {', '.join(targets())}")])
    return parser


def main(argv=None):
    """Run the command line and return its exit status.

    0 ok, 2 configuration error, 3 I/O error, 4 a verdict failed, 5 a
    verdict was inconclusive.
    """
    parser = build_parser()
    args = parser.parse_args(sys.argv[1:] if argv is None else argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s")

    try:
        return args.handler(args)
    except (XorQueryError, ValueError) as e:
        print(colorama.Fore.RED + f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(colorama.Fore.RED + f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
