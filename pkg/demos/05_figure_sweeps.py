"""Run built-in sweeps and write CSV files, as the command line does.

Runs the analytic backend for every outage preset (pass ``--mc N`` to add a
Monte Carlo column with N trials per point) and prints the high-SNR slopes
of the power sweeps.

    python demos/05_figure_sweeps.py [--mc N] [--out DIR]
"""

import argparse

from fdharq import experiments as E

ap = argparse.ArgumentParser()
ap.add_argument("--mc", type=int, default=0)
ap.add_argument("--out", default="results")
args = ap.parse_args()

for name, exp in E.builtin_figures().items():
    if exp.kind != "outage":
        continue
    if args.mc:
        exp = exp.with_(backend="both", n_trials=args.mc)
    rows = E.run_experiment(exp)
    csv_path, _ = E.write_outputs(exp, rows, args.out)
    line = f"{name}: {len(rows)} rows -> {csv_path}"
    if exp.sweep_variable == "power":
        slopes = {s.value: E.diversity_slope(rows, s, (25, 30)) for s in E.ANALYTIC_SCHEMES}
        line += "  slope 25-30 dB: " + ", ".join(f"{k} {v:.2f}" for k, v in slopes.items())
    if args.mc:
        frac, counted = E.agreement_fraction(rows)
        line += f"  within 3 stderr: {frac:.0%} of {counted}"
    print(line)
