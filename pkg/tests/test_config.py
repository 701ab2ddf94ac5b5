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

import os

import pytest
from pytest import approx
from pytest import raises

from xorquery.config import evaluate
from xorquery.config import experiment
from xorquery.config import integer
from xorquery.config import load_config
from xorquery.config import parse_config
from xorquery.config import require
from xorquery.config import scheme_config
from xorquery.config import verdict_specs
from xorquery.exceptions import InvalidConfig
from xorquery.scheme import Variant


FILES = os.path.join(os.path.dirname(__file__), "files")


@pytest.fixture
def minimal():
    return {"scheme.variant": "noiseless", "source.n": 24, "source.p": 0.1}


# values
@pytest.mark.parametrize("text, expected", [
    ("3", 3),
    (" 0.1 ", 0.1),
    ("1e5", 100000),
    ("2 * log2(8)", 6),
    ("ceil(2.5)", 3),
    ("true", True),
    ("false", False),
    ("noiseless", "noiseless"),
    ("two-stage", "two-stage"),
    ("channel.r_erase", "channel.r_erase"),
    ("0.2, 0.4", [0.2, 0.4]),
    ("1, 2,", [1, 2]),
    ("", ""),
])
def test_evaluate(text, expected):
    assert evaluate(text) == expected


def test_evaluate_natural_log():
    assert evaluate("ln(8) / ln(2)") == approx(3)


@pytest.mark.parametrize("text", ["1 / 0", "ln(-1)"])
def test_evaluate_errors(text):
    with raises(InvalidConfig):
        evaluate(text)


# files
def test_parse_config():
    text = "# comment\n\nsource.n = 24  # items\nsource.p=0.1\n"
    assert parse_config(text) == {"source.n": 24, "source.p": 0.1}


def test_parse_config_rejects_bare_words():
    with raises(InvalidConfig):
        parse_config("source.n\n")
    with raises(InvalidConfig):
        parse_config("= 3\n")


def test_load_config_with_overrides():
    config = load_config(os.path.join(FILES, "gallager.cfg"), ["m=6", "seed = 9"])
    assert config == {"ensemble": "gallager", "n": 24, "m": 6, "delta": 6,
                      "seed": 9}


def test_overrides_only():
    assert load_config(overrides=["a.b=2*3"]) == {"a.b": 6}


def test_missing_file():
    with raises(OSError):
        load_config(os.path.join(FILES, "missing.cfg"))


def test_require():
    assert require({"a": 1}, "a") == 1
    with raises(InvalidConfig) as e:
        require({}, "ensemble")
    assert "'ensemble'" in str(e.value)


def test_integer():
    assert integer("n", 24) == 24
    assert integer("n", 1e5) == 100000
    for value in (2.5, True, "ten"):
        with raises(InvalidConfig):
            integer("n", value)


# schemes
def test_scheme_config(minimal):
    cfg = scheme_config(dict(minimal, **{"ensemble.M": 3, "ensemble.delta": 6.0,
                                         "channel.design_r_erase": 0.2}))
    assert cfg.variant is Variant.NOISELESS_LDPC
    assert cfg.c_high == 3
    assert cfg.delta == 6 and isinstance(cfg.delta, int)
    assert cfg.budget_r_erase == 0.2


def test_scheme_config_missing_key(minimal):
    del minimal["source.p"]
    with raises(InvalidConfig):
        scheme_config(minimal)


def test_scheme_config_unknown_key(minimal):
    minimal["scheme.colour"] = "red"
    with raises(InvalidConfig):
        scheme_config(minimal)


def test_scheme_config_ignores_other_namespaces(minimal):
    minimal["verify.budget"] = 16
    assert scheme_config(minimal).n == 24


def test_experiment_defaults(minimal):
    exp = experiment(minimal)
    assert (exp.trials, exp.master_seed, exp.paired) == (1000, 0, False)
    assert exp.sweep_param is None


def test_experiment_sweep(minimal):
    exp = experiment(dict(minimal, **{
        "harness.trials": 50, "harness.paired": True,
        "sweep.param": "channel.r_erase", "sweep.values": 0.3}))
    assert exp.sweep_values == (0.3,)
    assert exp.paired
    assert [cfg.r_erase for _, _, cfg in exp.points()] == [0.3]


def test_experiment_file():
    config = load_config(os.path.join(FILES, "erasure_sweep.cfg"))
    exp = experiment(config)
    assert exp.scheme.variant is Variant.CONCATENATED_ERASURE
    assert exp.sweep_values == (0.1, 0.3)


# verdicts
def test_verdict_specs():
    config = {"verdict.error_rate": evaluate("<= 0.2"),
              "verdict.orphan_first": evaluate("~= 0.066 0.003"),
              "source.n": 10}
    assert verdict_specs(config) == [("error_rate", "<=", 0.2, 0.0),
                                     ("orphan_first", "~=", 0.066, 0.003)]


@pytest.mark.parametrize("text", [">> 0.2", "<= low", "<=", "<= 1 2 3"])
def test_invalid_verdict_specs(text):
    with raises(InvalidConfig):
        verdict_specs({"verdict.error_rate": text})
