#!/usr/bin/env python3
# Copyright 2026 The CORN Authors
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
"""Prints the wide-band PESQ score of a degraded recording.

Usage: pesq_oracle.py REFERENCE DEGRADED RATE

Intended as the pesq.command of a corn config:
  "python3 pesq_oracle.py {reference} {degraded} {rate}"
"""

import sys

import numpy as np
from pesq import pesq
from scipy.io import wavfile


def load(path):
    rate, data = wavfile.read(path)
    if data.dtype == np.int16:
        data = data.astype(np.float64) / 32768.0
    return rate, np.asarray(data, dtype=np.float64)


def main(argv):
    if len(argv) != 4:
        sys.stderr.write(__doc__)
        return 1
    _, ref = load(argv[1])
    _, deg = load(argv[2])
    rate = int(argv[3])
    mode = "wb" if rate == 16000 else "nb"
    print(f"{pesq(rate, ref, deg, mode):.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
