#!/usr/bin/env python3
"""Per-sweep cost of one-site TDVP: split versus original local basis.

Uses dense local exponentials in both bases so the cost is cubic in the
local dimension; the split basis trades one d_b-dimensional site for two
sqrt(d_b)-dimensional ones. The largest original-basis point takes on the
order of ten minutes per sweep.
"""

import sys

from splitmps.cli import main

if __name__ == "__main__":
    sys.exit(
        main(
            [
                "benchmark",
                "--bench_d_b", "16,36,64,100,144",
                "--bench_length", "4",
                "--bench_sweeps", "2",
                "--chi", "5",
                "--out_dir", "out",
                "--prefix", "scaling",
                *sys.argv[1:],
            ]
        )
    )
