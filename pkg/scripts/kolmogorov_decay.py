"""Median Kolmogorov distance between L_n and mu_n for a schedule of n.

    python scripts/kolmogorov_decay.py --sizes 50,100,200,400,800,1600 --trials 50
"""

import argparse
import csv
import sys

import numpy as np

from jacobi_ensembles import HermiteConfig, LaguerreConfig, ManovaConfig, lln_experiment


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--ensemble", choices=("hermite", "laguerre", "manova"), default="hermite")
    p.add_argument("--sizes", default="50,100,200,400,800,1600")
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=None)
    args = p.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    if args.ensemble == "hermite":
        configs = [HermiteConfig(n, args.beta) for n in sizes]
    elif args.ensemble == "laguerre":
        configs = [LaguerreConfig(n, 2.0 * n, args.beta) for n in sizes]
    else:
        configs = [ManovaConfig(n, args.beta) for n in sizes]
    rep = lln_experiment(configs, 4, args.trials, args.seed, args.workers)

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["n", "median_dK", "q10_dK", "q90_dK", "median_err_x2", "median_err_x4", "sqrt_n_times_median"])
    for pt in rep.per_n:
        q10, q90 = np.quantile(pt.kolmogorov, [0.1, 0.9])
        med = pt.moment_error_median
        out.writerow([pt.n, pt.kolmogorov_median, q10, q90, med[2], med[4], np.sqrt(pt.n) * pt.kolmogorov_median])


if __name__ == "__main__":
    main()
