#!/usr/bin/env python3
"""Reproduce every figure CSV into out/ (expect ~20-40 minutes)."""

import pathlib
import runpy
import sys

HERE = pathlib.Path(__file__).parent
SCRIPTS = [
    "entropy_sweep.py",
    "disorder_sweep.py",
    "mbl_gap_ratio.py",
    "echo_decay.py",
    "shadow_bias_sweep.py",
    "patched_energy.py",
]

if __name__ == "__main__":
    pathlib.Path("out").mkdir(exist_ok=True)
    for name in SCRIPTS:
        print(f"--- {name}")
        try:
            runpy.run_path(str(HERE / name), run_name="__main__")
        except SystemExit as exc:
            if exc.code:
                sys.exit(exc.code)
