#!/usr/bin/env python3
"""Smooth elliptic coefficient recovery with plain and shifted quadratic penalties."""

from pathlib import Path

from regupath import example2_smooth_config, run_experiment, write_bundle
from regupath.plots import emit_plots

if __name__ == "__main__":
    config = example2_smooth_config()
    bundle = run_experiment(config)
    out = Path(config.output_dir)
    for path in write_bundle(bundle, out) + emit_plots(bundle, out):
        print(path)
