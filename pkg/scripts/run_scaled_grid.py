"""Desk grids over a capacity-scaled population (mu_max up to 40).

The index-policy knob range 5..100 compares against backlog pressure
q * mood * mu_max, so where the interesting trade-offs land depends
directly on the population's capacity scale. With the default 1..10
capacities most of the knob range is unreachable and the index rule
without pending-time pressure mostly rests; with capacities drawn from
4..40 the full knob range is in play and the expected expiry ordering
(cpl < ac < mt, mw) emerges. This script reproduces that landscape.
"""

import argparse
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from workrest.population import Distribution, PopulationSpec, generate
from workrest.sweep import (
    SweepSpec,
    aggregate_report,
    report_rows_to_csv,
    run_sweep,
    sweep_rows_to_csv,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--jobs", type=int, default=2)
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--slots", type=int, default=2000)
    parser.add_argument("--n", type=int, default=500)
    parser.add_argument("--mu-max-lo", type=int, default=4)
    parser.add_argument("--mu-max-hi", type=int, default=40)
    args = parser.parse_args()

    population = generate(
        PopulationSpec(
            count=args.n,
            mu_max_dist=Distribution.uniform(args.mu_max_lo, args.mu_max_hi),
            seed=7,
        )
    )
    spec = SweepSpec(
        policies=("me", "mt", "mw", "ac", "cpl"),
        phi_grid=(5.0, 25.0, 50.0, 100.0),
        sigma_grid=(5.0, 25.0, 50.0, 100.0),
        theta1_grid=(0.2, 0.5, 0.8),
        theta2_grid=(0.2, 0.5, 0.8),
        lf_grid=tuple(round(0.1 * k, 1) for k in range(1, 11)),
        slots=args.slots,
        seed=7,
        deadline=3,
    )

    t0 = time.perf_counter()
    rows = run_sweep(spec, population, jobs=args.jobs)
    elapsed = time.perf_counter() - t0

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "scaled_sweep.csv").write_text(sweep_rows_to_csv(rows))
    report = aggregate_report(rows)
    (out_dir / "scaled_report.csv").write_text(report_rows_to_csv(report))

    print(f"{len(rows)} grid points in {elapsed:.1f}s -> {out_dir}/scaled_sweep.csv")
    for r in report:
        print(
            f"{r.policy:6s} mean_expiry={r.mean_expiry_avg:.4f} "
            f"effort={r.mean_effort_pct_of_me:7.2f}% "
            f"completion={r.mean_completion_pct_of_me:7.2f}% "
            f"ratio={r.superlinearity_ratio:.4f} {r.region}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
