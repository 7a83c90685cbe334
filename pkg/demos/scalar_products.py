"""Positive-definite vs indefinite scalar products for a real KG field.

Draws random mixed-frequency fields, compares the two products and follows the
total density under free evolution.

    python demos/scalar_products.py [--n 16] [--seed 0]
"""

import argparse

import numpy as np

from biortho.lattice import build_lattice, random_field, synthesize
from biortho.kg import evolve, four_current, kg_product, mostafazadeh_product, total_density


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    lat = build_lattice(args.n, 1.0)
    rng = np.random.default_rng(args.seed)
    print(f"{'field':>5} {'(f,f)_M':>12} {'(f,f)_KG':>12}")
    for i in range(5):
        f = random_field(lat, rng)
        print(f"{i:>5} {mostafazadeh_product(f, f).real:12.5g} {kg_product(f, f).real:12.5g}")

    # a real field: its KG charge vanishes, the positive product does not
    f = random_field(lat, rng, real=True)
    print(f"\nreal field: (f,f)_M = {mostafazadeh_product(f, f).real:.5g}, "
          f"(f,f)_KG = {kg_product(f, f).real:.2e}")
    j0 = four_current(synthesize(f), synthesize(f)).j0
    note = "dips below zero" if j0.min() < 0 else "stays non-negative"
    print(f"local density range [{j0.min():.3g}, {j0.max():.3g}]: the density {note}")

    print("\ntotal density under free evolution")
    for t in (0.0, 5.0, 10.0, 20.0):
        g = evolve(f, t)
        tot = total_density(four_current(synthesize(g), synthesize(g)))
        print(f"  t = {t:5.1f}  int J0 dV = {tot:.15g}")


if __name__ == "__main__":
    main()
