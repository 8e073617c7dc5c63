"""
generate_sample_pairs.py
---------------------------------------------------------
Writes the curated sample pairs under data/pairs/ and, optionally,
seeded random stable pairs next to them.

Each curated pair is rebuilt, certified and re-serialised, so the JSON
files always match what pair_to_json produces.
---------------------------------------------------------
"""

import argparse
import logging
import os
import sys
from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent
sys.path.append(str(BASE_DIR))

from scripts.cli import sample_stable_pair  # noqa: E402
from scripts.hitchin import HitchinPair, PoissonSection, is_stable, pair_to_json  # noqa: E402
from scripts.shared_utils import PAIRS_DIR, setup_logging, write_json  # noqa: E402
from scripts.spectral import genus, spectral_curve  # noqa: E402

# -------------------------------
# CURATED PAIRS
# -------------------------------
# name -> (splitting, n, theta as dense coefficient lists from z^0, sigma0)
SAMPLE_PAIRS = {
    "r1_n1_line": ((0,), 1, [[[2, 3]]], [1, 0, 0, 1]),
    "r2_n1_smooth": ((0, 0), 1, [[[0, 0], [1, 0]], [[0, 1], [0, 0]]], [1, 0, 0, 0]),
    "r2_n2_genus1": ((0, 0), 2, [[[0, 0, 0], [-1, 0, 1]], [[-4, 0, 1], [0, 0, 0]]], [1, 0, 0, 0, 1]),
    "r3_n1_genus1": (
        (0, 0, 0),
        1,
        [[[0, 0], [0, 0], [0, 1]], [[-1, 1], [0, 0], [0, 0]], [[0, 0], [1, 1], [0, 0]]],
        [1, 0, 0, 0],
    ),
    "r3_n2_genus4": (
        (0, 0, 0),
        2,
        [
            [[0, 0, 0], [0, 0, 0], [-1, 0, 1]],
            [[-4, 0, 1], [0, 0, 0], [0, 0, 0]],
            [[0, 0, 0], [-9, 0, 1], [0, 0, 0]],
        ],
        [1, 0, 0, 0, 1],
    ),
}


def write_curated(out_dir: str) -> int:
    written = 0
    for name, (splitting, n, theta, sigma0) in SAMPLE_PAIRS.items():
        pair = HitchinPair.build(splitting, n, theta)
        cert = is_stable(pair)
        if not cert.is_stable:
            logging.error("Curated pair %s lost its certificate (%s)", name, cert.value)
            continue
        path = os.path.join(out_dir, f"{name}.json")
        write_json(path, pair_to_json(pair, PoissonSection(n, tuple(sigma0))))
        logging.info("%s: %s, genus %d", name, cert.value, genus(spectral_curve(pair)))
        written += 1
    return written


def write_random(out_dir: str, seed: int, r: int, n: int, count: int, bound: int, max_tries: int) -> int:
    for k in range(count):
        pair, sigma, attempts = sample_stable_pair(seed, r, n, bound, max_tries, k)
        path = os.path.join(out_dir, f"random_r{r}_n{n}_seed{seed}_{k}.json")
        write_json(path, pair_to_json(pair, sigma))
        logging.info("%s after %d attempt(s)", path, attempts)
    return count


def main() -> int:
    p = argparse.ArgumentParser(description="Write sample Hitchin pairs to data/pairs/.")
    p.add_argument("--out-dir", default=PAIRS_DIR)
    p.add_argument("--random", type=int, default=0, help="Also draw this many random stable pairs")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--bound", type=int, default=5)
    p.add_argument("--max-tries", type=int, default=200)
    p.add_argument("-v", "--verbose", action="count", default=1)
    args = p.parse_args()
    setup_logging(args.verbose)

    total = write_curated(args.out_dir)
    if args.random:
        total += write_random(args.out_dir, args.seed, args.r, args.n, args.random, args.bound, args.max_tries)
    print(f"✅ {total} pair file(s) written to {args.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
