#!/usr/bin/env python3
import sys
import os
import json
import argparse

# Add the parent directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from perfcorr import config
from perfcorr.verifier import run_all, run_suite


def main():
    parser = argparse.ArgumentParser(description='Run the perfcorr theorem suites and summarize the results')
    parser.add_argument('suites', nargs='*', help='Suite ids or aliases (default: every registered suite)')
    parser.add_argument('--trials', type=int, default=config.DEFAULT_TRIALS)
    parser.add_argument('--seed', type=int, default=config.DEFAULT_SEED)
    parser.add_argument('--output', help='Output file path for the full results')

    args = parser.parse_args()
    config.configure_logging()

    if args.suites:
        results = [run_suite(s, args.trials, args.seed) for s in args.suites]
    else:
        results = run_all(args.trials, args.seed)

    full = [r.to_json() for r in results]
    if args.output:
        with open(args.output, 'w') as f:
            json.dump(full, f, indent=2)

    summary = {r.id: {'passed': r.passed, 'checks': r.checks, 'failures': len(r.failures)} for r in results}
    print(json.dumps(summary))
    sys.exit(0 if all(r.passed for r in results) else 1)


if __name__ == "__main__":
    main()
