"""Fraction of extremal random channels M_n -> M_m as a function of the Kraus count.

A channel with Kraus count t has t^2 operators K_t K_u^dagger in M_m, so
generic channels are extremal exactly when t^2 <= m^2. The table shows the
threshold emerging from the minimal-dilation test, cross-checked against the
Choi oracle.

    python scripts/extremality_survey.py [--samples 50] [--seed 0]
"""

import argparse

import numpy as np

from cpdilation.algebra import Algebra
from cpdilation.dilation import standard_module
from cpdilation.extremal import is_extremal
from cpdilation.oracles import choi_independence_oracle, random_channel


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)

    print(f"{'n':>2} {'m':>2} {'t':>2}  extremal  oracle-agree")
    for n in (1, 2, 3):
        for m in (1, 2, 3):
            A, B = Algebra((n,)), Algebra((m,))
            X, Y = standard_module(A), standard_module(B)
            for t in range(-(-m // n), n * m + 1):
                hits = agree = 0
                for _ in range(args.samples):
                    f = random_channel(A, B, t, rng)
                    verdict = is_extremal(X, Y, f).extremal
                    hits += verdict
                    agree += verdict == choi_independence_oracle(f)
                print(f"{n:>2} {m:>2} {t:>2}  {hits / args.samples:8.2f}  {agree}/{args.samples}")


if __name__ == "__main__":
    main()
