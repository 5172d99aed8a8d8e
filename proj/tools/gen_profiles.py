#!/usr/bin/env python3
"""Regenerates fixtures/spanish_day.csv.

Synthetic high-PV day at 15-minute resolution: four residential districts
with evening peaks and one commercial district whose rooftop PV injects
hard at midday (negative net demand is expressed via the separate pv_c
generation column, values in kW).
"""

import math
import pathlib

STEPS = 96


def bell(h, center, sigma):
    return math.exp(-(((h - center) / sigma) ** 2))


def plateau(h, start, end, softness=0.75):
    rise = 1.0 / (1.0 + math.exp(-(h - start) / softness))
    fall = 1.0 / (1.0 + math.exp((h - end) / softness))
    return rise * fall


def residential(h, peak, evening_center):
    base = 0.18 * peak
    morning = 0.30 * peak * bell(h, 7.5, 1.4)
    evening = peak * bell(h, evening_center, 2.0)
    return base + morning + evening


def commercial(h):
    return 120.0 + 650.0 * plateau(h, 8.5, 18.0)


def pv(h):
    if h < 6.0 or h > 20.0:
        return 0.0
    return 4200.0 * bell(h, 13.25, 2.6)


def main():
    out = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / "spanish_day.csv"
    rows = ["timestep,ld_r1,ld_r2,ld_r3,ld_r4,ld_c,pv_c"]
    for t in range(STEPS):
        h = t / 4.0
        vals = [
            residential(h, 2300.0, 19.0),
            residential(h, 2500.0, 19.5),
            residential(h, 2800.0, 20.0),
            residential(h, 2100.0, 19.25),
            commercial(h),
            pv(h),
        ]
        rows.append(str(t) + "," + ",".join(f"{v:.1f}" for v in vals))
    out.write_text("\n".join(rows) + "\n")
    print(f"wrote {out} ({STEPS} timesteps)")


if __name__ == "__main__":
    main()
