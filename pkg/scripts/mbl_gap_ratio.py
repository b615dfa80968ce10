#!/usr/bin/env python3
"""Mean spectral gap ratio against disorder strength: chaotic (GOE) to
localized (Poisson) crossover of the disordered Ising chain.

Run with --na/--nb to change the chain length (n = n_a + n_b).
"""

import sys

from projens.cli import main

if __name__ == "__main__":
    sys.exit(main([
        "gap-ratio", "--na", "5", "--nb", "5",
        "--w", "0.1,0.2,0.3,0.42,0.6,1,5", "--realizations", "100",
        "--seed", "909", "--out", "out/gap_ratio_n10.csv",
        *sys.argv[1:],
    ]))
