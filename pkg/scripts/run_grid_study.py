#!/usr/bin/env python3
"""Grid-quality study: Chebyshev 5x5 versus equally spaced 7x7.

Square simply supported plate (a = 16, h = 0.1, E = 30e6, nu = 0.316) over
a load ladder; errors are measured against a Chebyshev 13x13 solution.
"""

from dataclasses import replace

from dqplate import SIMPLY_SUPPORTED, UNIFORM, PlateSpec, load_sweep

BASE = PlateSpec.isotropic(
    a=16.0, h=0.1, e=30e6, nu=0.316, q=0.4, nx=5, ny=5, bc=SIMPLY_SUPPORTED
)
LOADS = [0.4, 0.8, 1.2, 1.6, 2.0]


def main():
    cheb5 = load_sweep(BASE, LOADS)
    uni7 = load_sweep(replace(BASE, nx=7, ny=7, grid_kind=UNIFORM), LOADS)
    ref = load_sweep(replace(BASE, nx=13, ny=13), LOADS)
    print(f"{'q':>6s} {'w/h ref':>9s} {'cheb 5x5 err':>13s} {'uniform 7x7 err':>16s}")
    for p5, p7, pr in zip(cheb5, uni7, ref):
        e5 = abs(p5.center_w_over_h - pr.center_w_over_h)
        e7 = abs(p7.center_w_over_h - pr.center_w_over_h)
        print(f"{pr.q:6.2f} {pr.center_w_over_h:9.5f} {e5:13.2e} {e7:16.2e}")


if __name__ == "__main__":
    main()
