"""Generate the bundled synthetic market and run every pipeline on it.

Writes data/ and out/ next to this script (override with --data-dir/--out-dir).
"""

import argparse
import pathlib
import sys

from cryptodynamics import cli, write_simulated_dataset

HERE = pathlib.Path(__file__).resolve().parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data-dir", default=HERE / "data", type=pathlib.Path)
    ap.add_argument("--out-dir", default=HERE / "out", type=pathlib.Path)
    ap.add_argument("--seed", default=20210630, type=int)
    args = ap.parse_args()

    args.data_dir.mkdir(parents=True, exist_ok=True)
    panel = write_simulated_dataset(args.data_dir / "price.csv",
                                    args.data_dir / "marketcap.csv",
                                    seed=args.seed)
    print(f"wrote synthetic dataset: {panel.n_assets} assets x "
          f"{panel.n_days} days -> {args.data_dir}")

    code = cli.main(["all", "--data-dir", str(args.data_dir),
                     "--out-dir", str(args.out_dir)])
    print(f"pipeline exit code: {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
