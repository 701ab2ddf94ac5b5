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


class XorQueryError(Exception):
    """Base class of every error raised by the package."""


class DimensionMismatch(XorQueryError, ValueError):
    """Operands have incompatible shapes."""


class DegenerateShape(XorQueryError, ValueError):
    """The matrix shape does not admit the requested quantity."""


class InvalidConfig(XorQueryError, ValueError):
    """A configuration is missing a key or holds an invalid value."""


class DomainError(XorQueryError, ValueError):
    """A numeric argument lies outside the domain of the function."""


class InstanceTooLarge(XorQueryError, ValueError):
    """The instance exceeds the exhaustive-search cap."""


class RejectionBudgetExceeded(XorQueryError):
    """The rejection sampler ran out of attempts."""


class StageOneFailed(XorQueryError):
    """The first stage of a two-stage scheme did not recover its labels."""
