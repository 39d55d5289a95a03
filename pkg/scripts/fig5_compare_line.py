"""Edge placement vs the equally spaced line network over a distance grid."""

import argparse

from one21.experiments import (
    ExperimentConfig,
    distance_summary,
    distance_sweep_compare,
    write_outputs,
)
from one21.model import PropagationParams


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gamma", type=float, default=1e6)
    ap.add_argument("--alpha", type=float, default=2.0)
    ap.add_argument("--grid", type=int, default=23)
    ap.add_argument("--out", default="results/fig5_compare_line")
    args = ap.parse_args()

    cfg = ExperimentConfig(PropagationParams(args.gamma, args.alpha), 600.0, d_grid_size=args.grid)
    rows = distance_sweep_compare(cfg)
    summary = distance_summary(cfg, rows)
    paths = write_outputs(rows, summary, args.out, cfg)
    print(f"crossover {summary['crossover_distance']:.2f}, first line win "
          f"approx {summary['first_line_win_approx']}, exact {summary['first_line_win_exact']}")
    print("wrote", *paths)


if __name__ == "__main__":
    main()
