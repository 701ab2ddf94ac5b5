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

from setuptools import setup


setup(
    name="xorquery",
    version="0.1.0",
    description="XOR-query crowdsourced classification simulator",
    install_requires=[
        # GF(2) linear algebra and samplers
        "numpy>=1.20",
        # binomial tails, Wilson intervals, entropies
        "scipy",
        # configuration values
        "simpleeval",
        # visualization
        "tabulate",
        "colorama",
    ],
    extras_require={
        "test": ["pytest"],
    },
    license="Apache",
    packages=[
        "xorquery",
        "xorquery.schemes",
    ],
    package_data={
        "xorquery": ["verify/*.cfg"],
    },
    entry_points={
        "console_scripts": ["xorquery = xorquery.cli:main"],
    },
    python_requires=">=3.8",
    keywords="xor queries crowdsourcing ldpc ldgm erasure coding simulation",
)
