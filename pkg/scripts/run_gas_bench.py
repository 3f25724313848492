#!/usr/bin/env python3
"""Replay the chain-topology gas experiment and emit plot-ready data.

Runs both algorithms over a grid of chain lengths for head and tail votes,
prints the cost table, writes one .dat file per position, and (with
--plot) renders the two curves against the block gas limit.
"""

import argparse
from pathlib import Path

from liquidtally.bench import bench_grid, format_bench_table, plot_data
from liquidtally.gas import GasSchedule

DEFAULT_GRID = list(range(10, 101, 10)) + list(range(200, 1001, 100)) + [2000, 3000]


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-list", default=",".join(str(n) for n in DEFAULT_GRID))
    parser.add_argument("--positions", default="head,tail")
    parser.add_argument("--gas-schedule", default=None)
    parser.add_argument("--out", default="bench_out", help="directory for .dat files")
    parser.add_argument("--plot", action="store_true", help="also write PNG curves")
    return parser.parse_args()


def main():
    args = parse_args()
    schedule = GasSchedule.from_json(args.gas_schedule) if args.gas_schedule else GasSchedule()
    n_list = [int(x) for x in args.n_list.split(",")]
    positions = args.positions.split(",")
    results = bench_grid(n_list, positions, schedule=schedule)
    print(format_bench_table(results))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for position in positions:
        path = out / f"bench_{position}.dat"
        path.write_text(plot_data(results, position))
        print(f"wrote {path}")
    if args.plot:
        render_plots(results, positions, schedule, out)


def render_plots(results, positions, schedule, out):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    for position in positions:
        rows = sorted(
            (r.n, r.algo, r.gas) for r in results if r.position == position
        )
        fig, ax = plt.subplots(figsize=(6, 4))
        for algo, style in (("traversal", "o-"), ("fast", "s-")):
            xs = [n for n, a, _ in rows if a == algo]
            ys = [g for n, a, g in rows if a == algo]
            ax.plot(xs, ys, style, label=algo, markersize=3)
        ax.axhline(schedule.block_gas_limit, linestyle="--", color="gray")
        ax.text(
            rows[0][0], schedule.block_gas_limit * 1.03, "Gas Limit", fontsize=8, color="gray"
        )
        ax.set_xlabel("chain length n")
        ax.set_ylabel("modeled gas per vote")
        ax.set_title(f"voting by the {position}")
        ax.legend()
        fig.tight_layout()
        path = out / f"bench_{position}.png"
        fig.savefig(path, dpi=150)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
