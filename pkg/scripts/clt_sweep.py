"""Sample variance of the scaled linear statistic against its limit, over n.

    python scripts/clt_sweep.py --ensemble laguerre --sizes 50,100,200,400 --f 0,1 --trials 1000
"""

import argparse
import csv
import sys

from jacobi_ensembles import ExperimentConfig, HermiteConfig, LaguerreConfig, ManovaConfig, clt_experiment


def make_config(name, n, beta, ratio, a, b):
    if name == "hermite":
        return HermiteConfig(n, beta)
    if name == "laguerre":
        return LaguerreConfig(n, n / ratio, beta)
    return ManovaConfig(n, beta, a, b)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--ensemble", choices=("hermite", "laguerre", "manova"), default="hermite")
    p.add_argument("--sizes", default="50,100,200,400")
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--gamma", type=float, default=0.5, help="Laguerre ratio n/m")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--f", default="0,0,1")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=None)
    args = p.parse_args()

    f = [float(c) for c in args.f.split(",")]
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["n", "sample_variance", "variance_se", "target_sigma2", "skewness", "excess_kurtosis", "ks_vs_normal"])
    for n in (int(s) for s in args.sizes.split(",")):
        cfg = make_config(args.ensemble, n, args.beta, args.gamma, args.a, args.b)
        rep = clt_experiment(ExperimentConfig(cfg, f, args.trials, args.seed), workers=args.workers)
        out.writerow([n, rep.sample_variance, rep.variance_se, rep.target_sigma2,
                      rep.skewness, rep.excess_kurtosis, rep.ks_vs_normal])
        sys.stdout.flush()


if __name__ == "__main__":
    main()
