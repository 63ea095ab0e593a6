#!/usr/bin/env python3
"""Load-deflection curves for the rectangular orthotropic plate.

Prints center w/h versus pressure for simply supported and clamped edges
at two grid resolutions each, so grid consistency is visible directly.
"""

from dataclasses import replace

from dqplate import CLAMPED, SIMPLY_SUPPORTED, PlateSpec, load_sweep

BASE = PlateSpec(
    a=9.4, b=7.75, h=0.0624, e1=18.7e6, e2=1.3e6, nu12=0.3, g12=0.6e6,
    bc=SIMPLY_SUPPORTED, q=1.0, nx=7, ny=7,
)

RUNS = [
    ("simply supported", SIMPLY_SUPPORTED, [0.1, 0.25, 0.5, 1.0, 2.0, 4.0], (7, 9)),
    ("clamped", CLAMPED, [0.2, 0.4, 0.7, 1.0, 1.3, 1.6], (9, 15)),
]


def main():
    for name, bc, loads, (coarse, fine) in RUNS:
        a = load_sweep(replace(BASE, bc=bc, nx=coarse, ny=coarse), loads)
        b = load_sweep(replace(BASE, bc=bc, nx=fine, ny=fine), loads)
        print(f"\n{name} edges")
        print(f"{'q':>6s} {f'w/h {coarse}x{coarse}':>12s} "
              f"{f'w/h {fine}x{fine}':>12s} {'rel diff':>9s}")
        for pa, pb in zip(a, b):
            rel = abs(pa.center_w_over_h - pb.center_w_over_h) / pb.center_w_over_h
            print(f"{pa.q:6.2f} {pa.center_w_over_h:12.4f} "
                  f"{pb.center_w_over_h:12.4f} {rel:9.4f}")


if __name__ == "__main__":
    main()
