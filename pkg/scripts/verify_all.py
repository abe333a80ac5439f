"""Run every check on every bundled model and print a compact table."""
import argparse
import sys

from covariant_rmatrix.models.modelfile import BUNDLED, load_model
from covariant_rmatrix.models.pipeline import run_pipeline


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--oracle-samples", type=int, default=20)
    args = ap.parse_args()
    bad = 0
    for name in sorted(BUNDLED):
        rep = run_pipeline(load_model(name), oracle_samples=args.oracle_samples, timings=True)
        for c in rep.checks:
            ms = f"{c.millis:8.0f} ms" if c.millis is not None else ""
            print(f"{name:<12} {c.name:<26} {c.status:<8} {ms}")
        bad += not rep.ok
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
