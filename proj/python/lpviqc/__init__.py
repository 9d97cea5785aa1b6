# Copyright 2026 The lpviqc Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""LPV time-delay IQC synthesis and verification."""

import json
import os

import numpy as np

from . import _lpviqc
from ._lpviqc import ClassViolation

__all__ = [
    "ClassViolation",
    "synthesize",
    "analyze",
    "simulate",
    "reproduce_table",
    "validate_iqc",
    "multiplier_response",
    "check_config",
]


def _config(config):
    if isinstance(config, dict):
        return json.dumps(config)
    return os.fspath(config)


def _result(result):
    if isinstance(result, dict):
        return json.dumps(result)
    with open(os.fspath(result)) as f:
        return f.read()


def check_config(config, base_dir="."):
    """Raises ValueError when the config does not parse."""
    _lpviqc.parse_config(_config(config), base_dir)


def synthesize(config, base_dir="."):
    """Synthesis with gain recovery; returns the result document as a dict."""
    return json.loads(_lpviqc.synthesize(_config(config), base_dir))


def analyze(config, result, gamma=None, base_dir="."):
    """Analysis certificate for stored gains (dict or path to synthesis_result.json)."""
    return json.loads(_lpviqc.analyze(_config(config), _result(result), gamma, base_dir))


def simulate(config, result, scenario=None, base_dir="."):
    """Returns (summary dict, trace dict of numpy arrays)."""
    summary, trace = _lpviqc.simulate(_config(config), _result(result), scenario, base_dir)
    return json.loads(summary), {k: np.asarray(v) for k, v in trace.items()}


def reproduce_table(config, threads=0, base_dir="."):
    return _lpviqc.reproduce_table(_config(config), threads, base_dir)


def validate_iqc(tau_bar, r, kinds=(), pairs=50, seed=1):
    return _lpviqc.validate_iqc(tau_bar, r, list(kinds), pairs, seed)


def multiplier_response(kind, tau_bar, r, omega):
    """(closed-form phi(j omega), realized filter channel response)."""
    return _lpviqc.multiplier_response(kind, tau_bar, r, omega)
