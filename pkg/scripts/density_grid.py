"""Render the sign-pattern decomposition of a 2-coordinate Lasso estimator.

Prints the nine sign-pattern masses (they sum to one) and writes a CSV grid
of the continuous part of the error density, ready for a contour plot:

    python3 scripts/density_grid.py --rho 0.5 --lam 0.75,0.75 \
        --beta 0,-0.25 --span 2.0 --steps 81 --out density.csv
"""

import argparse
import sys

import numpy as np

import lassodist as ld


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rho", type=float, default=0.5, help="off-diagonal of the 2x2 gram")
    ap.add_argument("--lam", default="0.75,0.75")
    ap.add_argument("--beta", default="0,-0.25")
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--span", type=float, default=2.0, help="grid half-width around 0")
    ap.add_argument("--steps", type=int, default=41)
    ap.add_argument("--out", default=None, help="CSV path (default: stdout)")
    args = ap.parse_args(argv)

    gram = np.array([[1.0, args.rho], [args.rho, 1.0]])
    prob = ld.design_from_gram(gram)
    lam = np.array([float(v) for v in args.lam.split(",")])
    beta = np.array([float(v) for v in args.beta.split(",")])
    tuning = ld.tuning_vector(lam)
    model = ld.gaussian_model(prob, beta, args.sigma)

    total = 0.0
    print("sign-pattern masses:")
    for a in (-1, 0, 1):
        for b in (-1, 0, 1):
            mass = ld.orthant_mass(prob, model, tuning, ld.SignVector(d=(a, b))).estimate
            total += mass
            print(f"  d = ({a:+d}, {b:+d})   {mass:.10f}")
    print(f"  sum          {total:.12f}")

    grid = np.linspace(-args.span, args.span, args.steps)
    lines = ["z1,z2,value"]
    for z1 in grid:
        for z2 in grid:
            val = ld.error_density(prob, model, tuning, (z1, z2))
            lines.append(f"{z1:.17g},{z2:.17g},{val:.17g}")
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.steps * args.steps} grid points to {args.out}")


if __name__ == "__main__":
    main()
