#!/usr/bin/env python3
"""Design distance of the disorder-randomized projected ensemble against
the disorder strength W/J, pooling 2^(n_a+n_b) realizations per point.
"""

import sys

from projens.cli import main

if __name__ == "__main__":
    sys.exit(main([
        "disorder-scan", "--na", "4", "--nb", "4", "--jt", "1000", "--k", "2",
        "--w", "0.001,0.01,0.1,0.42,1,3,10", "--realizations", "256",
        "--seed", "0", "--out", "out/disorder_sweep.csv",
        *sys.argv[1:],
    ]))
