# Copyright 2026 The qphase Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http:#www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the qphase C++ library."""

import json

from ._qphase import *  # noqa: F401,F403
from ._qphase import run_experiment as _run_experiment


def run(config, workers=1):
    """Run an experiment config (dict or JSON string); returns (summary dict, {file: csv text})."""
    text = config if isinstance(config, str) else json.dumps(config)
    summary, tables = _run_experiment(text, workers)
    return json.loads(summary), tables
