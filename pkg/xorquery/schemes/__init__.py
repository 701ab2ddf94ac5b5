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

# Make all the files available as submodules.
from . import budget
from . import noiseless
from . import concatenated
from . import twostage
from . import ensemble

from ..scheme import SchemeConfig
from ..scheme import Variant

SCHEMES = {
    Variant.PROP1_ENSEMBLE: ensemble.UniformEnsembleScheme,
    Variant.NOISELESS_LDPC: noiseless.NoiselessScheme,
    Variant.CONCATENATED_ERASURE: concatenated.ConcatenatedScheme,
    Variant.TWO_STAGE_CORRELATED: twostage.TwoStageScheme,
}


def make_scheme(cfg):
    """Return the QueryScheme running the variant of a SchemeConfig."""
    if not isinstance(cfg, SchemeConfig):
        raise TypeError(f"expected a SchemeConfig, got {type(cfg).__name__}")
    return SCHEMES[cfg.variant](cfg)


# Allow 'from xorquery.schemes import *' syntax.
__all__ = [
    "budget",
    "noiseless",
    "concatenated",
    "twostage",
    "ensemble",
    "make_scheme",
]
