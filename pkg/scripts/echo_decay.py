#!/usr/bin/env python3
"""Overlap decay between evolutions under two independent disorder
realizations, against the Gaussian short-time estimate."""

import sys

from projens.cli import main

if __name__ == "__main__":
    sys.exit(main([
        "echo", "--na", "5", "--nb", "5", "--w", "1.0", "--realizations", "30",
        "--seed", "0", "--out", "out/echo_decay.csv",
        *sys.argv[1:],
    ]))
