#!/usr/bin/env python3
"""Shrinking-noise study on the linear benchmark with a range source."""

from pathlib import Path

import numpy as np

from regupath import (QuadraticPenalty, SolveOptions, fredholm_model,
                      run_delta_sequence, write_theory_report)

if __name__ == "__main__":
    model = fredholm_model(101)
    t = model.x_grid.points()
    w_src = model.x_grid.function(0.1 * (np.sin(np.pi * t) + 0.5 * np.sin(3 * np.pi * t)))
    x_dagger = model.apply(w_src)
    report = run_delta_sequence(
        model, QuadraticPenalty(), 2.0, 1.0, 0.8, 35,
        deltas=[0.2, 0.1, 0.05, 0.025, 0.0125], seed=7, x_dagger=x_dagger,
        opts=SolveOptions(max_iters=3000, grad_tol=1e-9, grad_tol_abs=1e-6),
    )
    out = write_theory_report(report, Path("results/theory/theory.csv"))
    print(out)
    for row in report.convergence_table:
        print(f"delta={row.delta:.5f} alpha*={row.alpha_star:.3e} "
              f"theta*={row.theta_star:.3e} bregman={row.bregman:.3e}")
