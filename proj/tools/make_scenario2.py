#!/usr/bin/env python3
"""Generate data/scenario2_speed.csv, an 80 s stop-and-go speed plan.

Start from rest, accelerate to 15 m/s, three 5 m/s dips, brake to a stop.
Consecutive knots are joined by raised-cosine transitions so the reference
acceleration is continuous.
"""

import pathlib

import numpy as np

# (time s, speed m/s)
KNOTS = [(0, 0), (5, 0), (15, 15), (25, 15), (30, 10), (35, 15), (40, 10),
         (45, 15), (55, 15), (67, 0), (80, 0)]


def main() -> None:
    t = np.arange(0, 80.0 + 1e-9, 0.5)
    v = np.zeros_like(t)
    for (t0, v0), (t1, v1) in zip(KNOTS, KNOTS[1:]):
        m = (t >= t0) & (t <= t1)
        s = (t[m] - t0) / (t1 - t0)
        v[m] = v0 + (v1 - v0) * (1 - np.cos(np.pi * s)) / 2

    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "scenario2_speed.csv"
    with out.open("w") as fh:
        fh.write("time_s,speed_mps\n")
        for tk, vk in zip(t, v):
            fh.write(f"{tk:.1f},{vk:.4f}\n")


if __name__ == "__main__":
    main()
