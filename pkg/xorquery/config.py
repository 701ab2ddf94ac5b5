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

"""Flat ``key = value`` configuration files.

Values are evaluated as expressions (numbers, arithmetic, log2, ln, sqrt,
ceil, floor, true, false); anything that is not an expression stays a string
and comma separated values become lists. Command-line overrides are applied
on top of the file.
"""

import math
from collections import namedtuple

from simpleeval import InvalidExpression
from simpleeval import SimpleEval

if __package__:
    from .exceptions import InvalidConfig
    from .harness import Experiment
    from .scheme import SchemeConfig
else:
    from xorquery.exceptions import InvalidConfig
    from xorquery.harness import Experiment
    from xorquery.scheme import SchemeConfig


FUNCTIONS = {
    "log2": math.log2,
    "ln": math.log,
    "sqrt": math.sqrt,
    "ceil": math.ceil,
    "floor": math.floor,
}
NAMES = {"true": True, "false": False}

# config key -> SchemeConfig field
SCHEME_KEYS = {
    "scheme.variant": "variant",
    "scheme.epsilon": "epsilon",
    "scheme.epsilon_prime": "epsilon_prime",
    "scheme.margin": "margin",
    "scheme.m": "m",
    "scheme.compression": "compression",
    "scheme.decoder": "decoder",
    "scheme.ml_cap": "ml_cap",
    "scheme.k1": "k1",
    "scheme.k2": "k2",
    "scheme.oracle": "oracle",
    "scheme.exponent": "exponent",
    "source.n": "n",
    "source.p": "p",
    "source.q": "q",
    "source.r_flip": "r_flip",
    "channel.r_erase": "r_erase",
    "channel.design_r_erase": "design_r_erase",
    "ensemble.delta": "delta",
    "ensemble.outer": "outer",
    "ensemble.rho_c": "rho_c",
    "ensemble.c_low": "c_low",
    "ensemble.M": "c_high",
    "ensemble.rejection_cap": "rejection_cap",
}
INTEGER_FIELDS = {"n", "m", "delta", "ml_cap", "rejection_cap"}
SCHEME_NAMESPACES = ("scheme.", "source.", "channel.", "ensemble.")

VerdictSpec = namedtuple("VerdictSpec", "observable direction reference tolerance")


def evaluate(text):
    """Evaluate one configuration value.

    :text: The raw value.
    :return: A number, a boolean, a string or a list of those.
    """
    text = text.strip()
    if not text:
        return ""
    if "," in text:
        return [evaluate(item) for item in text.split(",") if item.strip()]
    evaluator = SimpleEval(functions=FUNCTIONS, names=NAMES)
    try:
        return evaluator.eval(text)
    except (InvalidExpression, SyntaxError):
        return text
    except (ArithmeticError, ValueError) as e:
        raise InvalidConfig(f"cannot evaluate {text!r}: {e}")


def _split(line, origin):
    key, sep, value = line.partition("=")
    if not sep or not key.strip():
        raise InvalidConfig(f"{origin}: expected 'key = value', got {line!r}")
    return key.strip(), value


def parse_config(text, origin="<config>"):
    """Parse the text of a configuration file into a dictionary."""
    config = {}
    for number, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, value = _split(line, f"{origin}:{number}")
        config[key] = evaluate(value)
    return config


def load_config(path=None, overrides=()):
    """Load a configuration file and apply ``key=value`` overrides.

    :path: The configuration file, or None for overrides only.
    :overrides: An iterable of ``key=value`` strings; they beat file values.
    :return: A dictionary of evaluated values.
    """
    config = {}
    if path is not None:
        with open(path, encoding="utf-8") as f:
            config = parse_config(f.read(), str(path))
    for override in overrides:
        key, value = _split(override, "override")
        config[key] = evaluate(value)
    return config


def require(config, key):
    try:
        return config[key]
    except KeyError:
        raise InvalidConfig(f"missing required key {key!r}")


def integer(key, value):
    """Return ``value`` as an int, refusing non integral numbers."""
    if isinstance(value, bool) or not isinstance(value, (int, float)) or \
            not float(value).is_integer():
        raise InvalidConfig(f"{key} must be an integer, got {value!r}")
    return int(value)


def scheme_config(config):
    """Build the SchemeConfig described by the scheme.*, source.*, channel.*
    and ensemble.* keys."""
    for key in ("scheme.variant", "source.n", "source.p"):
        require(config, key)
    kwargs = {}
    for key, value in config.items():
        if not key.startswith(SCHEME_NAMESPACES):
            continue
        if key not in SCHEME_KEYS:
            raise InvalidConfig(f"unknown key {key!r}")
        name = SCHEME_KEYS[key]
        kwargs[name] = integer(key, value) if name in INTEGER_FIELDS else value
    try:
        return SchemeConfig(**kwargs)
    except TypeError as e:
        raise InvalidConfig(f"invalid scheme configuration: {e}")


def experiment(config):
    """Build the Experiment described by a configuration dictionary."""
    values = config.get("sweep.values", ())
    if not isinstance(values, (list, tuple)):
        values = (values,)
    return Experiment(
        scheme=scheme_config(config),
        trials=integer("harness.trials", config.get("harness.trials", 1000)),
        master_seed=integer("harness.seed", config.get("harness.seed", 0)),
        sweep_param=config.get("sweep.param") or None,
        sweep_values=tuple(values),
        paired=bool(config.get("harness.paired", False)),
    )


def verdict_specs(config):
    """Return the requested verdicts as VerdictSpecs.

    ``verdict.<observable> = "<op> <reference> [tolerance]"`` with op one of
    ``<=``, ``>=``, ``~=``; the reference and tolerance must not contain
    spaces.
    """
    specs = []
    for key, value in config.items():
        if not key.startswith("verdict."):
            continue
        tokens = str(value).split()
        if len(tokens) not in (2, 3) or tokens[0] not in ("<=", ">=", "~="):
            raise InvalidConfig(
                f"{key} must read '<op> <reference> [tolerance]', got {value!r}")
        numbers = [evaluate(token) for token in tokens[1:]]
        if not all(isinstance(n, (int, float)) for n in numbers):
            raise InvalidConfig(f"{key} has a non numeric reference: {value!r}")
        tolerance = numbers[1] if len(numbers) > 1 else 0.0
        specs.append(VerdictSpec(key[len("verdict."):], tokens[0],
                                 float(numbers[0]), float(tolerance)))
    return specs
