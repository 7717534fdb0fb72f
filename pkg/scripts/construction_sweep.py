#!/usr/bin/env python3
"""Build every (K, B) scheme in a range and summarize what came out.

For each configuration: the selected field, the key regime and its
searched parameter, the five structural validation checks, the algebraic
security audit, and a batch of seeded random rounds checked against the
plain componentwise sum.

    python scripts/construction_sweep.py --K-max 8 --trials 50
"""

import argparse
import sys
import time

from hsagg.audit import algebraic_audit
from hsagg.protocol import build_scheme, direct_sum, random_inputs, run_round


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--K-min", type=int, default=2)
    parser.add_argument("--K-max", type=int, default=8)
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    failures = 0
    header = f"{'K':>2} {'B':>2} {'q':>5} {'regime':<11} {'param':>6} {'valid':>5} {'audit':>5} {'recover':>9} {'secs':>6}"
    print(header)
    print("-" * len(header))
    for K in range(args.K_min, args.K_max + 1):
        for B in range(1, K + 1):
            started = time.monotonic()
            params = build_scheme(K, B, seed=args.seed)
            param = params.keys.ratio if params.keys.ratio is not None else params.keys.anchor
            valid = params.validation.passed
            audit = algebraic_audit(params).passed
            exact = 0
            for trial in range(args.trials):
                inputs = random_inputs(params, params.block_size, seed=trial)
                result = run_round(params, inputs, seed=trial + 1)
                exact += result.recovered_sum == direct_sum(params, inputs)
            elapsed = time.monotonic() - started
            ok = valid and audit and exact == args.trials
            failures += not ok
            print(
                f"{K:>2} {B:>2} {params.field.q:>5} {params.keys.regime:<11} "
                f"{param if param is not None else '-':>6} {str(valid):>5} {str(audit):>5} "
                f"{exact:>4}/{args.trials:<4} {elapsed:>6.2f}"
            )
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
