#!/usr/bin/env python3
# Copyright 2026 The vcn Authors. All Rights Reserved.
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

"""Regenerates the bundled synthetic grayscale corpus (data/corpus).

Ten deterministic 320x320 images mixing smooth shading, edges, periodic
texture, and blob fields, so the block codec and the networks see
structure comparable to natural photographs without redistributing any.
"""

import os
import numpy as np


def blur(img, passes=2):
    out = img.astype(np.float64)
    for _ in range(passes):
        out = (np.roll(out, 1, 0) + np.roll(out, -1, 0) + np.roll(out, 1, 1) +
               np.roll(out, -1, 1) + 4 * out) / 8.0
    return out


def save_pgm(path, img):
    img = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(img.tobytes())


def main():
    n = 320
    yy, xx = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    rng = np.random.default_rng(20260809)
    out_dir = os.path.join(os.path.dirname(__file__), "..", "data", "corpus")
    os.makedirs(out_dir, exist_ok=True)

    images = {}

    images["ramp"] = 255 * (0.35 * xx / n + 0.45 * yy / n +
                            0.2 * np.sin(2 * np.pi * xx / 160) ** 2)

    images["blobs"] = np.zeros((n, n))
    for _ in range(24):
        cy, cx = rng.uniform(0, n, 2)
        s = rng.uniform(10, 50)
        a = rng.uniform(40, 120)
        images["blobs"] += a * np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) /
                                      (2 * s * s))
    images["blobs"] = 255 * images["blobs"] / images["blobs"].max()

    rects = np.full((n, n), 200.0)
    for _ in range(18):
        y0, x0 = rng.integers(0, n - 40, 2)
        h, w = rng.integers(20, 120, 2)
        rects[y0:y0 + h, x0:x0 + w] = rng.uniform(20, 235)
    images["rects"] = blur(rects, 1)

    images["waves"] = 127 + 60 * np.sin(2 * np.pi * (xx + 0.6 * yy) / 48) + \
        50 * np.cos(2 * np.pi * (yy - 0.3 * xx) / 90)

    r = np.sqrt((yy - n / 2) ** 2 + (xx - n / 2) ** 2)
    images["rings"] = 127 + 110 * np.cos(2 * np.pi * r / 56) * np.exp(-r / 300)

    images["cloth"] = blur(rng.uniform(0, 255, (n, n)), 6) * 0.6 + \
        40 * np.sin(2 * np.pi * xx / 24) * np.sin(2 * np.pi * yy / 24) + 60

    stripes = 127 + 100 * np.sign(np.sin(2 * np.pi * (xx + yy) / 64))
    images["stripes"] = blur(stripes + rng.normal(0, 6, (n, n)), 2)

    vign = 1 - 0.8 * (r / r.max()) ** 2
    images["portrait"] = blur(images["blobs"] * 0.5 + rects * 0.5, 3) * vign

    images["noisefield"] = blur(rng.uniform(0, 255, (n, n)), 12)

    grid = np.where((yy // 40 + xx // 40) % 2 == 0, 80.0, 175.0)
    images["plaza"] = blur(grid + 30 * np.sin(2 * np.pi * r / 120), 2)

    for name, img in sorted(images.items()):
        save_pgm(os.path.join(out_dir, f"{name}.pgm"), img)
        print("wrote", name)


if __name__ == "__main__":
    main()
