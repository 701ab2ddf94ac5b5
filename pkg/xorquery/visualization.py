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

import tabulate

if __package__:
    from . import utils
else:
    from xorquery import utils


def _number(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _interval(observation):
    return f"[{observation.lo:.4g}, {observation.hi:.4g}]"


def checks_table(checks, **kwargs):
    rows = [(check.name, _number(check.observed.estimate),
             _interval(check.observed), check.direction,
             _number(check.reference), utils.colored(check.verdict))
            for check in checks]
    return tabulate.tabulate(rows,
                             headers=("Check", "Observed", "95% CI", "Op",
                                      "Reference", "Verdict"),
                             tablefmt="fancy_grid",
                             **kwargs)


def points_table(points, **kwargs):
    rows = []
    for point in points:
        lo, hi = point.ci
        reference = point.references.get("error_rate")
        rows.append((point.param or "-", _number(point.value), point.trials,
                     point.successes, _number(point.error_rate),
                     f"[{lo:.4g}, {hi:.4g}]",
                     _number(reference and reference.value)))
    return tabulate.tabulate(rows,
                             headers=("Parameter", "Value", "Trials",
                                      "Successes", "Error rate", "95% CI",
                                      "Reference"),
                             tablefmt="fancy_grid",
                             **kwargs)


def failures_table(points, **kwargs):
    rows = [(point.param or "-", _number(point.value), reason, count)
            for point in points
            for reason, count in point.failures.items()]
    return tabulate.tabulate(rows,
                             headers=("Parameter", "Value", "Reason", "Trials"),
                             tablefmt="fancy_grid",
                             **kwargs)


def budget_table(report, **kwargs):
    rows = [("Queries", report.m),
            ("Items per query", _number(report.max_items_per_query)),
            ("Rate m/n", _number(float(report.rate_normalized))
             if report.rate_normalized is not None else ""),
            ("Shannon floor nHb(p)", _number(report.shannon_floor)),
            ("Formula", report.bound_formula)]
    if report.outer_rate is not None:
        rows.append(("Outer rate R_c", _number(float(report.outer_rate))))
    if report.stages:
        rows.append(("Stages", " + ".join(str(m) for m in report.stages)))
    if report.bound is not None:
        rows.append(("Bound", _number(report.bound)))
    return tabulate.tabulate(rows, tablefmt="fancy_grid", **kwargs)


def profile_table(matrix, profile, **kwargs):
    rows = [("Rows", matrix.rows),
            ("Columns", matrix.cols),
            ("Max row weight", profile.max_weight),
            ("Total ones", profile.total_ones),
            ("Density", "undefined" if profile.density is None
             else _number(float(profile.density)))]
    return tabulate.tabulate(rows, tablefmt="fancy_grid", **kwargs)
