#!/usr/bin/env python3
"""Generate data/us06_style.csv, a synthetic 600 s aggressive drive cycle.

The shape follows the published outline of the US06 cycle (urban start with
two stops, a long high-speed segment peaking near 129 km/h, urban finish)
but the samples are synthetic: monotone cubic interpolation through hand-set
waypoints plus deterministic speed ripple, with accelerations capped at
3.8 m/s^2 and decelerations at 3.1 m/s^2.
"""

import csv
import math
import pathlib

import numpy as np
from scipy.interpolate import PchipInterpolator

# (time s, speed km/h)
WAYPOINTS = [
    (0, 0), (2, 0), (14, 68), (22, 76), (30, 60), (38, 72), (46, 40), (52, 0),
    (56, 0), (66, 62), (78, 80), (90, 66), (100, 78), (112, 40), (120, 0),
    (132, 0), (146, 84), (160, 110), (176, 118), (190, 106), (204, 126),
    (222, 129), (240, 116), (256, 124), (274, 104), (290, 118), (310, 128),
    (330, 112), (348, 122), (366, 100), (384, 116), (404, 126), (424, 108),
    (442, 120), (460, 96), (474, 60), (486, 0), (494, 0), (506, 60), (518, 72),
    (530, 48), (540, 64), (552, 30), (560, 0), (566, 0), (576, 52), (586, 44),
    (596, 0), (600, 0),
]


def main() -> None:
    t = np.arange(0, 601, 1.0)
    wt, wv = zip(*WAYPOINTS)
    v = PchipInterpolator(wt, np.array(wv) / 3.6)(t)

    moving = v > 8.0
    ripple = 0.9 * np.sin(2 * math.pi * t / 9.0) + 0.6 * np.sin(2 * math.pi * t / 4.3 + 1.0)
    v = np.where(moving, v + ripple, v)

    for k in range(1, len(v)):
        v[k] = min(v[k], v[k - 1] + 3.8)
        v[k] = max(v[k], v[k - 1] - 3.1, 0.0)
    v[0] = 0.0
    v[-1] = 0.0

    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "us06_style.csv"
    with out.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time_s", "speed_mps"])
        for tk, vk in zip(t, v):
            w.writerow([f"{tk:.0f}", f"{vk:.4f}"])


if __name__ == "__main__":
    main()
