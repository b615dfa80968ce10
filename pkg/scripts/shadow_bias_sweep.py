#!/usr/bin/env python3
"""Infinite-shot shadow-estimation bias against injected bath entropy,
averaged over Haar instances (run once per bath size)."""

import sys

from projens.cli import main

if __name__ == "__main__":
    rc = 0
    for n_b in (2, 3, 4):
        rc = rc or main([
            "shadow-bias", "--na", "1", "--nb", str(n_b),
            "--sc", ",".join(str(s) for s in range(0, min(4, n_b) + 1)),
            "--realizations", "100", "--seed", str(7000 + n_b),
            "--out", f"out/shadow_bias_nb{n_b}.csv",
            *sys.argv[1:],
        ])
    sys.exit(rc)
