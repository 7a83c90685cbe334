"""Spontaneous emission: the dual-to-plain norm ratio and the line shape.

    python demos/photon_emission.py [--omega0 1.0]
"""

import argparse

from biortho.emission import AtomParams, line_fwhm, norm_ratio_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--omega0", type=float, default=1.0)
    args = ap.parse_args()

    p = AtomParams(args.omega0)
    times = [t / args.omega0 for t in (10, 50, 200, 1000)]
    print(f"{'omega0 t':>9}  {'<psi|psi~> / (<psi|psi> omega0)':>32}")
    for t, v in norm_ratio_scan(p, times):
        print(f"{args.omega0 * t:9.0f}  {v:32.6f}")

    t = 50 / args.omega0
    print(f"\nsinc^2 line: FWHM * t = {line_fwhm(args.omega0, t) * t:.6f}")


if __name__ == "__main__":
    main()
