#!/usr/bin/env python3
"""Ground-state energy-density error from patched-quench shadows, with a
fixed ancilla string versus per-shot randomized ancillas."""

import sys

from projens.cli import main

if __name__ == "__main__":
    sys.exit(main([
        "patched-energy", "--na", "4", "--nb", "2", "--jt", "100",
        "--shots", "5000", "--sc", "0,8", "--realizations", "20",
        "--seed", "1100", "--out", "out/patched_energy.csv",
        *sys.argv[1:],
    ]))
