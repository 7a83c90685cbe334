"""Biorthogonal position eigenvectors are local; Newton-Wigner ones are not.

    python demos/position_nonlocality.py [--n 32] [--mass 1.0]
"""

import argparse

import numpy as np

from biortho import UnitSystem, build_lattice, synthesize
from biortho.kg import nw_map
from biortho.position import biorthogonality_gram, make_position_state, tail_fraction


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--n", type=int, default=32)
    ap.add_argument("--mass", type=float, default=1.0)
    args = ap.parse_args()

    lat = build_lattice(args.n, 1.0, UnitSystem(mass=args.mass))
    on = lat.units.hbar / (2 * lat.dx**3)
    sites = [(0, 0, 0), (1, 0, 0), (0, 2, -1)]
    G = biorthogonality_gram(lat, sites)
    print("Gram block <pi(x_i)|phi(x_j)> / (hbar / 2 dx^3):")
    print(np.array2string(G.real / on, precision=12, suppress_small=True))

    pi = make_position_state(lat, (0, 0, 0), 1, "pi").backing
    phi = make_position_state(lat, (0, 0, 0), 1, "phi").backing
    nw = nw_map(phi, "from_nw")
    bio = tail_fraction(synthesize(pi).phi, lat, 0.5 * lat.dx)
    far = tail_fraction(synthesize(nw).phi, lat, 4 * lat.dx)
    print(f"\nL1 fraction outside one cell, biorthogonal eigenvector: {bio:.2e}")
    print(f"L1 fraction outside 4 dx, Newton-Wigner eigenvector:   {far:.3f}")


if __name__ == "__main__":
    main()
