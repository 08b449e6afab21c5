"""Measure how the quadratic-phase taper widens the nadir beam."""

from __future__ import annotations

import numpy as np

from earthfixed.array import build_array, mean_beamwidth, widened_weights

LAM = 299_792_458.0 / 20e9


def main() -> None:
    arr = build_array(512, 0.65 * LAM, LAM)
    for target in np.arange(0.0, 15.1, 1.5):
        w = widened_weights(arr, 0.0, 0.0, 0.0, target, target, 1.0)
        print(f"requested {target:5.1f} deg -> measured -3 dB width {mean_beamwidth(w):6.2f} deg")


if __name__ == "__main__":
    main()
