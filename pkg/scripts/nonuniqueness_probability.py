"""Probability of a non-unique Lasso solution along a mean sweep.

Uses the rank-1 design X = (1, 2) with tuning (1, 2): the solution is
non-unique exactly when the estimator is nonzero, so the analytic curve is
one minus the atom at zero.  The Monte-Carlo column re-solves the problem
and counts boundary sign patterns whose face meets the row space:

    python3 scripts/nonuniqueness_probability.py --reps 20000 --seed 0
"""

import argparse

import numpy as np

import lassodist as ld


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mu-min", type=float, default=-4.0)
    ap.add_argument("--mu-max", type=float, default=4.0)
    ap.add_argument("--points", type=int, default=9)
    ap.add_argument("--reps", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    prob = ld.build_problem(np.array([[1.0, 2.0]]))
    tuning = ld.tuning_vector([1.0, 2.0])
    verdict = ld.check_uniqueness(prob, tuning)
    print(f"uniqueness for every response: {verdict.unique}")

    print(f"\n{'mu':>8} {'analytic':>12} {'mc':>12} {'se':>10} {'z':>6}")
    worst = 0.0
    for i, mu in enumerate(np.linspace(args.mu_min, args.mu_max, args.points)):
        # beta = (mu, 0) gives X beta = mu; only the mean matters on a fiber.
        model = ld.gaussian_model(prob, np.array([mu, 0.0]), 1.0)
        analytic = 1.0 - ld.prob_all_zero(prob, model, tuning).estimate
        mc = ld.estimate_nonuniqueness_probability(
            prob, model, tuning,
            config=ld.SimulationConfig(n_rep=args.reps, seed=args.seed + i),
        )
        se = max(mc.std_error, 1e-12)
        zscore = abs(analytic - mc.estimate) / se
        worst = max(worst, zscore)
        print(f"{mu:>8.3f} {analytic:>12.8f} {mc.estimate:>12.8f} {se:>10.2e} {zscore:>6.2f}")
    print(f"\nworst |analytic - mc| = {worst:.2f} standard errors")
    if worst > 5.0:
        raise SystemExit("discrepancy beyond 5 standard errors")


if __name__ == "__main__":
    main()
