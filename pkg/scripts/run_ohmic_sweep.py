#!/usr/bin/env python3
"""Ohmic-bath magnetization sweep: coherent, incoherent, and localized regimes.

Produces one CSV per coupling in out/ohmic/, at the full production scale
(d_b=100, L=100, chi=5). Expect tens of minutes per coupling; couplings fan
out over --jobs workers.
"""

import sys

from splitmps.cli import main

ALPHAS = "0.1,0.2,0.3,0.5,0.7,1.0,1.2,1.5"

if __name__ == "__main__":
    sys.exit(
        main(
            [
                "run",
                "--alpha", ALPHAS,
                "--s", "1.0",
                "--delta", "0.1",
                "--d_b", "100",
                "--length", "100",
                "--chi", "5",
                "--tn_variant", "literature",
                "--scheme", "one_site",
                "--init_noise", "1e-8",
                "--t_max", "150",
                "--dt", "0.1",
                "--out_dir", "out/ohmic",
                "--prefix", "ohmic",
                *sys.argv[1:],
            ]
        )
    )
