"""Write density tables (closed form and Stieltjes inversion) for a set of limit laws.

    python scripts/density_tables.py --outdir tables --grid 401
"""

import argparse
import os

from jacobi_ensembles import cli

LAWS = {
    "sc": [],
    "mp_0.25": ["--gamma", "0.25"],
    "mp_0.5": ["--gamma", "0.5"],
    "mp_0.9": ["--gamma", "0.9"],
    "kmk_0_0": ["--ka", "0", "--kb", "0"],
    "kmk_1_0.5": ["--ka", "1", "--kb", "0.5"],
    "kmk_3_3": ["--ka", "3", "--kb", "3"],
}


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--outdir", default="tables")
    p.add_argument("--grid", type=int, default=401)
    p.add_argument("--eps", default="1e-2,1e-3,1e-4")
    args = p.parse_args()
    os.makedirs(args.outdir, exist_ok=True)
    for name, extra in LAWS.items():
        law = name.split("_")[0]
        path = os.path.join(args.outdir, f"density_{name}.csv")
        argv = ["density", "--law", law, *extra, "--grid", str(args.grid), "--inversion", "--eps", args.eps, "--out", path]
        code = cli.main(argv)
        if code:
            raise SystemExit(code)
        print(path)


if __name__ == "__main__":
    main()
