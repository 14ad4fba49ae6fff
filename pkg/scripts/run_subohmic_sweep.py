#!/usr/bin/env python3
"""Sub-Ohmic (s=0.5) magnetization sweep across the localization transition.

The spin localizes for couplings beyond roughly 0.125 at delta=0.1; weaker
couplings show damped coherent or overdamped decay toward zero.
"""

import sys

from splitmps.cli import main

ALPHAS = "0.01,0.05,0.075,0.1,0.15,0.2"

if __name__ == "__main__":
    sys.exit(
        main(
            [
                "run",
                "--alpha", ALPHAS,
                "--s", "0.5",
                "--delta", "0.1",
                "--d_b", "100",
                "--length", "100",
                "--chi", "5",
                "--tn_variant", "literature",
                "--scheme", "one_site",
                "--init_noise", "1e-8",
                "--t_max", "250",
                "--dt", "0.1",
                "--out_dir", "out/subohmic",
                "--prefix", "subohmic",
                *sys.argv[1:],
            ]
        )
    )
