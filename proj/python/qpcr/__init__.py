# Copyright 2026 The qpcr Authors
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

"""Outcome propagation, key rates and resource counts for parity-code repeater chains."""

from ._qpcr import *  # noqa: F401,F403
from ._qpcr import ChainModel, ChannelParams, CodeParams, DetectorParams, ErrorModelSpec


def key_rate(n, m, l0=2.0, l_tot=1000.0, spec=None, detector=None, l_att=22.0):
    """Secure key rate R t0 of QPC(n, m) at spacing l0 over l_tot km."""
    model = ChainModel(spec if spec is not None else ErrorModelSpec.loss_only(),
                       detector if detector is not None else DetectorParams())
    return model.evaluate(CodeParams(n, m), ChannelParams(l0=l0, l_tot=l_tot, l_att=l_att)).rates.r_t0
