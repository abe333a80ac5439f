"""Perturb the built-in r-matrices and show which CYBE entries stop vanishing."""
import argparse
import random

from covariant_rmatrix.lax import perturb_r, rational_r, trigonometric_sg_r, verify_cybe

ap = argparse.ArgumentParser()
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("-n", type=int, default=5)
args = ap.parse_args()
rng = random.Random(args.seed)

for make in (rational_r, trigonometric_sg_r):
    print(make.__name__, "CYBE holds:", verify_cybe(make())[0])
    for _ in range(args.n):
        pr, (a, b, c) = perturb_r(make(), rng)
        ok, s = verify_cybe(pr)
        print(f"  +{c}*{a}x{b}/(mu-lambda): holds={ok}, nonzero entries={len(s.entries)}")
