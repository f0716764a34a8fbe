#!/usr/bin/env python3
"""Run every packaged experiment config and summarize the outcomes.

Usage: python scripts/run_all_experiments.py [--out-root DIR]

Note: the sparse experiment's sine-kernel clause is expected to fail for the
packaged constant-ratio bump positions; see the report it writes.
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from cdlab.cli import main as cdlab_main  # noqa: E402

CONFIGS = [
    "identities.json",
    "bulk_legendre.json",
    "bulk_chebyshev.json",
    "opuc_bulk.json",
    "hard_edge.json",
    "fisher_hartwig.json",
    "jump.json",
    "schrodinger.json",
    "sparse.json",
    "bulk_pure_point.json",
]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out-root", default="out")
    args = parser.parse_args()
    cfg_dir = pathlib.Path(__file__).resolve().parents[1] / "configs"
    statuses = {}
    for name in CONFIGS:
        out = pathlib.Path(args.out_root) / name.removesuffix(".json")
        print(f"\n=== {name} ===")
        statuses[name] = cdlab_main(
            ["run", "--config", str(cfg_dir / name), "--out", str(out)]
        )
    print("\nsummary:")
    for name, status in statuses.items():
        print(f"  {'ok  ' if status == 0 else 'FAIL'} {name}")
    return max(statuses.values())


if __name__ == "__main__":
    raise SystemExit(main())
