#!/usr/bin/env python3
"""Empirical check of jury-sampling uniformity under the seeded stream scheme.

Draws juries of k from a pool of n across many proposal ordinals and prints the
frequency of every subset against the uniform expectation.
"""

import argparse
import itertools
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from agora.procedures import jury_open  # noqa: E402
from agora.rng import derive_stream  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pool", type=int, default=5)
    parser.add_argument("--jurors", type=int, default=2)
    parser.add_argument("--draws", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=1234)
    args = parser.parse_args()

    pool = [f"u{i + 1}" for i in range(args.pool)]
    counts = {frozenset(c): 0 for c in itertools.combinations(pool, args.jurors)}
    for ordinal in range(args.draws):
        jury = jury_open(pool, args.jurors, derive_stream(args.seed, ordinal))
        counts[frozenset(jury)] += 1

    expected = args.draws / len(counts)
    print(f"{len(counts)} subsets, expected {expected:.1f} each over {args.draws} draws")
    worst = 0.0
    for subset, count in sorted(counts.items(), key=lambda kv: sorted(kv[0])):
        deviation = (count - expected) / expected
        worst = max(worst, abs(deviation))
        print(f"  {{{', '.join(sorted(subset))}}}: {count}  ({deviation:+.1%})")
    print(f"worst deviation: {worst:.1%}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
