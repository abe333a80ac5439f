"""Shift each bundled Lagrangian by d(theta) and compare the multisymplectic forms.

Zeroth-order theta leaves Omega untouched. Once theta depends on jets the
canonical boundary form picks up a d-closed correction, so Omega moves by a
delta-d-exact piece; this script counts both outcomes.
"""
import argparse
import random

from covariant_rmatrix.models.modelfile import BUNDLED, load_model
from covariant_rmatrix.models.pipeline import ModelContext
from covariant_rmatrix.randomgen import random_theta
from covariant_rmatrix.variational import gauge_comparison

ap = argparse.ArgumentParser()
ap.add_argument("--seed", type=int, default=1)
ap.add_argument("--trials", type=int, default=10)
ap.add_argument("--order", type=int, default=1)
args = ap.parse_args()
rng = random.Random(args.seed)

for name in sorted(BUNDLED):
    ctx = ModelContext(load_model(name))
    L = ctx.lagrangian
    exact = modulo = 0
    for _ in range(args.trials):
        g = gauge_comparison(L, random_theta(rng, L.fields, order=args.order), ctx.data)
        exact += g.exact
        modulo += g.modulo_exact
    print(f"{name:<12} exact {exact}/{args.trials}   modulo delta-d-exact {modulo}/{args.trials}")
