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
from . import exceptions
from . import utils
from . import gf2
from . import models
from . import ensembles
from . import decoders
from . import scheme
from . import schemes
from . import harness
from . import config
from . import verification
from . import visualization

# Allow 'from xorquery import *' syntax.
__all__ = [
    "config",
    "decoders",
    "ensembles",
    "exceptions",
    "gf2",
    "harness",
    "models",
    "scheme",
    "schemes",
    "utils",
    "verification",
    "visualization",
]
