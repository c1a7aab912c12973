#!/usr/bin/env python3
"""Regenerate calibration.json (the committed growth-constant fixture).

The asymptotic growth statements come with unspecified constants; this
one-time run measures them on the canonical configuration (L = 1/4,
growth factor 10, four blocks) and pins test thresholds at half the
measured minima (double the maxima for upper bounds).
"""
import json
from pathlib import Path

import opuc_entropy as oe

cal = oe.calibrate(scale=0.25, growth_factor=10.0, k_max=4)
target = Path(__file__).resolve().parent.parent / "src" / "opuc_entropy" / "calibration.json"
with open(target, "w", encoding="utf-8", newline="\n") as fh:
    json.dump(cal, fh, indent=2, sort_keys=True)
    fh.write("\n")
print(f"wrote {target}")
for key, value in cal["thresholds"].items():
    print(f"  threshold {key}: {value:.6g}")
