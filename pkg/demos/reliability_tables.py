"""Walk through the code-design numbers: how the rate threshold picks
the reliable-index pool, and how the two union bounds reproduce the
design tables.

Run:  python3 demos/reliability_tables.py
"""
import argparse

from polarsec.analysis import (
    SCALING_EXPONENT_BEC,
    index_pool_size,
    rate_threshold,
    reproduce_tables,
)
from polarsec.keys import reference_params


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=10, help="log2 block length")
    parser.add_argument("--epsilon", type=float, default=0.05)
    args = parser.parse_args()

    size = 1 << args.n
    capacity = 1.0 - args.epsilon
    threshold = rate_threshold(size, capacity)
    pool = index_pool_size(size, capacity)
    print(f"block length N = {size}, erasure rate {args.epsilon}")
    print(f"capacity I(W) = {capacity}")
    print(f"admissible rate I(W) - N^(-1/{SCALING_EXPONENT_BEC}) = {threshold:.6f}")
    print(f"truncated to R0 = {int(threshold * 100) / 100:.2f}  ->  "
          f"index pool = {pool} most reliable positions")
    print()

    report = reproduce_tables(reference_params())
    print("best-case selection (K most reliable of the pool), against the")
    print("published design rows:")
    print(f"  {'R':>5}  {'K':>4}  {'P_e1':>12}  {'printed':>10}  {'dev':>7}")
    for row in report.table1:
        print(f"  {row['R']:>5.2f}  {row['K']:>4}  {row['P_e1']:>12.3e}"
              f"  {row['printed_P_e1']:>10.3e}  {row['rel_dev']:>6.1%}")
    print()
    print("worst-case selection (K least reliable of the pool) is what a")
    print("secret, randomly drawn information set must survive:")
    print(f"  {'K':>4}  {'P_e1':>12}  {'P_e2':>12}  {'printed':>10}  {'dev':>7}")
    for row in report.table2:
        print(f"  {row['K']:>4}  {row['P_e1']:>12.3e}  {row['P_e2']:>12.3e}"
              f"  {row['printed_P_e2']:>10.3e}  {row['rel_dev_P_e2']:>6.1%}")
    print()
    print("cross-checks carried with the tables:")
    for note in report.notes:
        print(f"  - {note}")


if __name__ == "__main__":
    main()
