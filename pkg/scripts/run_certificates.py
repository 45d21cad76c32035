#!/usr/bin/env python3
"""Run the full convergence-certificate battery and exit nonzero on any
failure (suitable as a CI gate)."""

import sys

from wpmm.cli import main

if __name__ == "__main__":
    sys.exit(main(["certify", "all"] + sys.argv[1:]))
