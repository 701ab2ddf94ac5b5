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

import colorama
import numpy as np

colorama.init(autoreset=True)


# Environment variable capping the number of worker threads (0 = auto).
THREADS_ENV = "XORQUERY_THREADS"


def make_rng(seed):
    """Return a numpy Generator for the given seed.

    :seed: An integer seed, a SeedSequence, or an existing Generator (returned
        unchanged so that callers can thread one stream through a pipeline).
    :return: A ``numpy.random.Generator``.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def derive_seed(master_seed, point_index, trial_index):
    """Derive the seed of one trial from the experiment master seed.

    The derivation is counter based: the trial seed is the first 64-bit word
    of ``SeedSequence(master_seed, spawn_key=(point_index, trial_index))``, so
    any trial can be replayed without running the ones before it.

    :master_seed: The experiment master seed.
    :point_index: The index of the sweep point.
    :trial_index: The index of the trial within the point.
    :return: A non-negative Python integer.
    """
    sequence = np.random.SeedSequence(
        master_seed, spawn_key=(point_index, trial_index))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def thread_count(default=0):
    """Return the number of harness threads.

    Reads ``XORQUERY_THREADS``; zero or unset means one thread per CPU.
    """
    value = os.environ.get(THREADS_ENV, "").strip() or str(default)
    try:
        threads = int(value)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {value!r}")
    if threads < 0:
        raise ValueError(f"{THREADS_ENV} must be non negative")
    return threads or (os.cpu_count() or 1)


VERDICT_COLORS = {
    "PASS": colorama.Fore.GREEN,
    "FAIL": colorama.Fore.RED,
    "INCONCLUSIVE": colorama.Fore.YELLOW,
}


def colored(verdict):
    """Return the verdict name wrapped in its console color."""
    name = getattr(verdict, "name", str(verdict))
    return VERDICT_COLORS.get(name, "") + name + colorama.Style.RESET_ALL


def announce(message):
    print(colorama.Fore.CYAN + f"\n[*] {message}")
