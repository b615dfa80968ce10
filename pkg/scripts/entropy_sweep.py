#!/usr/bin/env python3
"""Design distance of the chaotic-Ising projected ensemble against the
injected classical entropy, with the analytic rms benchmark alongside.

Reference settings: 4+4 qubits, JT = 1000, moment orders 1..3.
"""

import sys

from projens.cli import main

if __name__ == "__main__":
    sys.exit(main([
        "fig1c", "--na", "4", "--nb", "4", "--jt", "1000",
        "--k", "1,2,3", "--sc", "0,1,2,3,4,5,6,7,8",
        "--seed", "0", "--out", "out/entropy_sweep.csv",
        *sys.argv[1:],
    ]))
