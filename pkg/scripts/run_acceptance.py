"""Run the acceptance criteria and write a JSON report.

    python scripts/run_acceptance.py [--criteria 1 2 ...] [--report report.json]
"""

import argparse
import json
import sys

from cpdilation.acceptance import oracle_checks, run_all


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--criteria", type=int, nargs="+", default=None)
    p.add_argument("--report", default="acceptance_report.json")
    args = p.parse_args()

    results = [oracle_checks()] + run_all(args.criteria)
    for r in results:
        print(r.line())
    with open(args.report, "w") as fh:
        json.dump(
            [{"number": r.number, "name": r.name, "passed": r.passed, "seconds": r.seconds, "details": r.details} for r in results],
            fh,
            indent=2,
        )
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
