#!/usr/bin/env python3
"""Desk-scale covariance-estimation experiment.

Generates a synthetic low-rank + sparse instance, runs both solver variants
across a small penalty sweep, and writes the traces under out/cme/. Pass
--preset paper-cme for the full-size protocol (d = 400, T = 2000, 20 trials);
that run takes hours, not minutes.
"""

import sys

from wpmm.cli import main

if __name__ == "__main__":
    args = sys.argv[1:]
    defaults = ["--d", "60", "--r", "3", "--iters", "1000",
                "--outdir", "out/cme"]
    sys.exit(main(["cme"] + defaults + args))
