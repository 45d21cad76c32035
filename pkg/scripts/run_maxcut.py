#!/usr/bin/env python3
"""Desk-scale Max Cut SDP experiment.

Runs the fixed-step solver on a random Erdos-Renyi graph and writes traces
under out/maxcut/. To run on a benchmark graph instead, pass
--graph G1.txt (searched in $WPMM_DATA_DIR) and, per the known optima for
G1/G2 (rank 13) and G3 (rank 14), e.g. --rank 13; add --preset paper-maxcut
for the full 2000-iteration protocol.
"""

import sys

from wpmm.cli import main

if __name__ == "__main__":
    args = sys.argv[1:]
    defaults = ["--random-n", "40", "--random-p", "0.2", "--iters", "1000",
                "--rank", "10", "--outdir", "out/maxcut"]
    sys.exit(main(["maxcut"] + defaults + args))
