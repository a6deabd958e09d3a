#!/usr/bin/env python3
# Copyright 2026 The sotif_kitti Authors
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
"""Writes the small evaluation fixture: a KITTI tree with hand-shaped labels and
a prediction directory with jittered, duplicated, missing and spurious boxes."""

import math
import random
import shutil
import struct
import sys
import zlib
from pathlib import Path

FRAMES = 12
TEST_FRAMES = 10


def fmt2(v):
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def wrap(a):
    while a > math.pi:
        a -= 2 * math.pi
    while a < -math.pi:
        a += 2 * math.pi
    return a


def label_line(cls, trunc, occ, bbox, dims, loc, ry, score=None):
    alpha = wrap(ry - math.atan2(loc[0], loc[2]))
    fields = [cls, fmt2(trunc), str(occ), fmt2(alpha)]
    fields += [fmt2(v) for v in bbox]
    fields += [fmt2(v) for v in dims]
    fields += [fmt2(v) for v in loc]
    fields.append(fmt2(ry))
    if score is not None:
        fields.append(f"{score:.4f}")
    return " ".join(fields)


def tiny_png():
    def chunk(tag, data):
        body = tag + data
        return struct.pack(">I", len(data)) + body + struct.pack(">I", zlib.crc32(body) & 0xFFFFFFFF)

    raw = b"\x00\x00\x00\x00"
    return (b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", struct.pack(">IIBBBBB", 1, 1, 8, 2, 0, 0, 0))
            + chunk(b"IDAT", zlib.compress(raw)) + chunk(b"IEND", b""))


def calib_text():
    p = [721.5377, 0.0, 609.5593, 0.0, 0.0, 721.5377, 172.854, 0.0, 0.0, 0.0, 1.0, 0.0]
    rows = {
        "P0": p, "P1": p, "P2": p, "P3": p,
        "R0_rect": [1, 0, 0, 0, 1, 0, 0, 0, 1],
        "Tr_velo_to_cam": [0, -1, 0, 0, 0, 0, -1, -0.08, 1, 0, 0, -0.27],
        "Tr_imu_to_velo": [1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0],
    }
    return "".join(f"{k}: " + " ".join(f"{float(v):.12e}" for v in vals) + "\n"
                   for k, vals in rows.items())


def write_velodyne_sample(path):
    points = [(1.0, 2.0, 3.0, 0.5), (4.0, 5.0, 6.0, 1.0)]
    path.write_bytes(b"".join(struct.pack("<4f", *p) for p in points))


def main(out_root):
    rng = random.Random(20240117)
    out_root = Path(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    write_velodyne_sample(out_root / "two_points.bin")
    dataset = out_root / "dataset"
    preds_dir = out_root / "predictions"
    for d in (dataset, preds_dir):
        if d.exists():
            shutil.rmtree(d)
    for sub in ("velodyne", "label_2", "calib", "image_2", "ImageSets"):
        (dataset / sub).mkdir(parents=True)
    preds_dir.mkdir(parents=True)

    heights = [18.0, 30.0, 45.0, 60.0]
    occlusions = [0, 0, 1, 2, 3]
    truncations = [0.0, 0.0, 0.1, 0.2, 0.4, 0.6]
    shared_scores = [0.9, 0.75, 0.5]

    ids = [f"{i:06d}" for i in range(FRAMES)]
    for idx, fid in enumerate(ids):
        (dataset / "velodyne" / f"{fid}.bin").write_bytes(b"")
        (dataset / "calib" / f"{fid}.txt").write_text(calib_text())
        (dataset / "image_2" / f"{fid}.png").write_bytes(tiny_png())

        n_gt = 0 if idx == 3 else rng.randint(1, 4)
        gts = []
        for k in range(n_gt):
            loc = [round(rng.uniform(-6, 6), 2), 1.65, round(8 + 11 * k + rng.uniform(0, 4), 2)]
            dims = [round(rng.uniform(1.4, 1.6), 2), round(rng.uniform(1.6, 1.9), 2),
                    round(rng.uniform(3.6, 4.8), 2)]
            ry = round(rng.uniform(-math.pi, math.pi), 2)
            h = rng.choice(heights) + rng.uniform(0, 5)
            left = rng.uniform(100, 1000)
            top = rng.uniform(120, 200)
            bbox = [left, top, left + rng.uniform(30, 120), top + h]
            gts.append(dict(trunc=rng.choice(truncations), occ=rng.choice(occlusions), bbox=bbox,
                            dims=dims, loc=loc, ry=ry))
        lines = [label_line("Car", g["trunc"], g["occ"], g["bbox"], g["dims"], g["loc"], g["ry"])
                 for g in gts]
        if idx == 5:
            lines.append("DontCare -1 -1 -10 500.00 170.00 540.00 190.00 -1 -1 -1 -1000 -1000 -1000 -10")
        (dataset / "label_2" / f"{fid}.txt").write_text("".join(l + "\n" for l in lines))

        if idx == FRAMES - 1:
            continue  # frame without a prediction file
        preds = []
        for g in gts:
            if rng.random() < 0.2:
                continue
            s = rng.choice([0.02, 0.06, 0.3])
            loc = [g["loc"][0] + rng.gauss(0, s), g["loc"][1] + rng.gauss(0, 0.05),
                   g["loc"][2] + rng.gauss(0, s)]
            dims = [d * rng.uniform(0.97, 1.03) for d in g["dims"]]
            ry = wrap(g["ry"] + rng.gauss(0, 0.03))
            score = rng.choice(shared_scores) if rng.random() < 0.3 else round(rng.uniform(0.2, 1.0), 4)
            preds.append(label_line("Car", 0.0, 0, g["bbox"], dims, loc, ry, score))
            if rng.random() < 0.25:
                loc2 = [loc[0] + 0.3, loc[1], loc[2] - 0.2]
                preds.append(label_line("Car", 0.0, 0, g["bbox"], dims, loc2, ry,
                                        round(score * 0.9, 4)))
        for _ in range(rng.randint(0, 2)):
            loc = [round(rng.uniform(-10, 10), 2), 1.65, round(rng.uniform(5, 60), 2)]
            preds.append(label_line("Car", 0.0, 0, [600, 170, 640, 200], [1.5, 1.7, 4.0], loc,
                                    round(rng.uniform(-3, 3), 2), round(rng.uniform(0.05, 0.95), 4)))
        if idx == 7:
            preds.append(label_line("Pedestrian", 0.0, 0, [300, 150, 320, 200], [1.7, 0.6, 0.8],
                                    [-2.0, 1.65, 12.0], 0.0, 0.99))
        (preds_dir / f"{fid}.txt").write_text("".join(l + "\n" for l in preds))

    (dataset / "ImageSets" / "test.txt").write_text("".join(i + "\n" for i in ids[:TEST_FRAMES]))
    (dataset / "ImageSets" / "val.txt").write_text("".join(i + "\n" for i in ids[TEST_FRAMES:]))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent / "eval")
