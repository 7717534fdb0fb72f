#!/usr/bin/env python3
"""Tabulate the achievable corner against the converse bounds.

Produces the relay-upload and key-rate trade-off curves over B for each K
(the inverse-in-B trend, with the full-association gap flagged on the
per-user key rate).

    python scripts/rate_region_table.py --K 2:10 --out rates.csv
"""

import argparse
import sys

from hsagg.cli import main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--K", default="2:10", help="K or LO:HI range")
    parser.add_argument("--B", default=None, help="B or LO:HI; default 1..K")
    parser.add_argument("--out", default=None)
    args = parser.parse_args()

    argv = ["rates", "--K", args.K, "--format", "csv"]
    if args.B:
        argv += ["--B", args.B]
    if args.out:
        argv += ["--out", args.out]
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
