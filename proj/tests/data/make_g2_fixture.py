# Copyright 2026 The ionabsorb Authors
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

"""Writes g2_fixture.ttag and the brute-force g2 reference g2_fixture_golden.csv."""

import random
import struct

TICK_PS = 1000
BIN_TICKS = 100
HALF_BINS = 20


def main():
    rng = random.Random(2718)
    tags = []
    t = 0
    for _ in range(3000):
        t += rng.randint(0, 400)
        tags.append((t, 0))
        if rng.random() < 0.3:
            tags.append((t + rng.randint(0, 120), 2))
        if rng.random() < 0.2:
            tags.append((t + rng.randint(0, 3000), 2))
        if rng.random() < 0.1:
            tags.append((t + rng.randint(0, 50), 1))
    tags.sort()

    with open("g2_fixture.ttag", "wb") as f:
        f.write(b"TTAG" + struct.pack("<HIB", 1, TICK_PS, 4) + bytes(5))
        for ticks, ch in tags:
            f.write(struct.pack("<BQ", ch, ticks))

    a = [t for t, ch in tags if ch == 0]
    b = [t for t, ch in tags if ch == 2]
    counts = [0] * (2 * HALF_BINS + 1)
    for x in a:
        for y in b:
            lag = y - x
            k = (2 * lag + BIN_TICKS) // (2 * BIN_TICKS)  # nearest bin, halves up
            if -HALF_BINS <= k <= HALF_BINS:
                counts[k + HALF_BINS] += 1
    with open("g2_fixture_golden.csv", "w") as f:
        f.write("bin,counts\n")
        for i, c in enumerate(counts):
            f.write(f"{i - HALF_BINS},{c}\n")


if __name__ == "__main__":
    main()
