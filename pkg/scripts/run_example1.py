#!/usr/bin/env python3
"""Outlier-corrupted integral equation: theta-argmin rule vs discrepancy baselines."""

from pathlib import Path

from regupath import example1_config, run_experiment, write_bundle
from regupath.plots import emit_plots

if __name__ == "__main__":
    config = example1_config()
    bundle = run_experiment(config)
    out = Path(config.output_dir)
    for path in write_bundle(bundle, out) + emit_plots(bundle, out):
        print(path)
