"""Command-line front end: ``sample``, ``spectrum``, ``density``, ``clt`` and ``verify``.

Exit codes: 0 success, 1 a verify criterion failed, 2 usage error, 3
numerical failure.  Files are written to a temporary name and renamed on
success, so an error never leaves a partial output behind.  CSV outputs get
a ``<file>.manifest.json`` sidecar; JSON outputs embed a ``manifest`` key.
"""

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .distributions import RngStream
from .ensembles import HermiteConfig, JacobiMatrix, LaguerreConfig, ManovaConfig, sample_ensemble
from .errors import DomainError, ExperimentError, NumericalError, ParameterError
from .limit_laws import KestenMcKay, MarchenkoPastur, Semicircle, stieltjes_inversion
from .spectral import spectral_measure
from .stats import WORKERS_ENV, ExperimentConfig, clt_experiment, default_workers

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
WEIGHT_SUM_TOL = 1e-10


class UsageError(Exception):
    pass


# ----------------------------------------------------------------------------
# output helpers


def _num(x):
    """Shortest round-trip decimal for a float."""
    return repr(float(x))


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _manifest(command, args):
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "command")}
    return {
        "command": command,
        "config": config,
        "seed": getattr(args, "seed", None),
        "artifact_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit_csv(args, command, header, rows):
    text = _csv_text(header, rows)
    if args.out:
        _atomic_write(args.out, text)
        _atomic_write(args.out + ".manifest.json", json.dumps(_manifest(command, args), indent=2) + "\n")
    else:
        sys.stdout.write(text)


def _emit_json(args, command, body):
    body = dict(body)
    body["manifest"] = _manifest(command, args)
    text = json.dumps(body, indent=2) + "\n"
    if args.out:
        _atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------------
# argument parsing


def _add_ensemble_flags(p, required=True):
    p.add_argument("--ensemble", choices=("hermite", "laguerre", "manova"), required=required)
    p.add_argument("--n", type=int)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--m", type=float, help="Laguerre: second dimension, m > n - 1")
    p.add_argument("--a", type=float, default=0.0, help="MANOVA exponent a > -1")
    p.add_argument("--b", type=float, default=0.0, help="MANOVA exponent b > -1")
    p.add_argument("--seed", type=int, default=0)


def _ensemble_config(args):
    if args.n is None:
        raise UsageError("--n is required")
    if args.ensemble == "hermite":
        return HermiteConfig(args.n, args.beta)
    if args.ensemble == "laguerre":
        if args.m is None:
            raise UsageError("--m is required for the Laguerre ensemble")
        return LaguerreConfig(args.n, args.m, args.beta)
    return ManovaConfig(args.n, args.beta, args.a, args.b)


def _float_list(text):
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"cannot parse a comma-separated list of numbers from {text!r}") from None
    if not values:
        raise UsageError("expected at least one number")
    return values


def _read_matrix(path):
    diag, off = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"diag", "offdiag"} <= set(reader.fieldnames):
            raise UsageError(f"{path}: expected columns index,diag,offdiag")
        for row in reader:
            diag.append(float(row["diag"]))
            if row["offdiag"] not in ("", None):
                off.append(float(row["offdiag"]))
    return JacobiMatrix(diag, off)


# ----------------------------------------------------------------------------
# commands


def cmd_sample(args):
    cfg = _ensemble_config(args)
    J = sample_ensemble(cfg, RngStream(args.seed))
    rows = []
    for i in range(J.size):
        off = _num(J.offdiag[i]) if i < J.size - 1 else ""
        rows.append([i + 1, _num(J.diag[i]), off])
    _emit_csv(args, "sample", ["index", "diag", "offdiag"], rows)
    return EXIT_OK


def cmd_spectrum(args):
    if args.matrix:
        J = _read_matrix(args.matrix)
    elif args.ensemble:
        J = sample_ensemble(_ensemble_config(args), RngStream(args.seed))
    else:
        raise UsageError("give --matrix or ensemble flags")
    mu = spectral_measure(J)
    total = math.fsum(mu.weights)
    if not abs(total - 1.0) <= WEIGHT_SUM_TOL:
        raise NumericalError(f"spectral weights sum to {total!r}, not 1", size=J.size)
    rows = [[_num(x), _num(w)] for x, w in zip(mu.atoms, mu.weights)]
    _emit_csv(args, "spectrum", ["lambda", "weight"], rows)
    return EXIT_OK


def _law(args):
    if args.law == "sc":
        return Semicircle()
    if args.law == "mp":
        if args.gamma is None:
            raise UsageError("--gamma is required for --law mp")
        return MarchenkoPastur(args.gamma)
    return KestenMcKay(args.ka, args.kb)


def cmd_density(args):
    law = _law(args)
    if args.grid < 2:
        raise UsageError("--grid must be at least 2")
    lo, hi = law.edges()
    margin = 0.05 * (hi - lo)
    xs = np.linspace(lo - margin, hi + margin, args.grid)
    dens = law.density(xs)
    header = ["x", "density"]
    eps = _float_list(args.eps) if args.inversion else None
    if args.inversion:
        header.append("inversion_estimate")
    rows = []
    for x, d in zip(xs, dens):
        row = [_num(x), _num(d)]
        if eps is not None:
            row.append(_num(stieltjes_inversion(law.stieltjes, float(x), eps)))
        rows.append(row)
    _emit_csv(args, "density", header, rows)
    return EXIT_OK


def cmd_clt(args):
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    cfg = ExperimentConfig(_ensemble_config(args), _float_list(args.f), args.trials, args.seed)
    report = clt_experiment(cfg, workers=args.workers)
    _emit_json(args, "clt", report.to_dict())
    return EXIT_OK


def cmd_verify(args):
    from .verify import run_suite

    only = [int(t) for t in args.only.split(",")] if args.only else None
    results = run_suite(args.suite, only, args.workers, log=lambda line: print(line, file=sys.stderr))
    body = {
        "suite": args.suite,
        "passed": all(r.passed for r in results),
        "criteria": [{k: v for k, v in r.to_dict().items() if k != "runtime"} for r in results],
        "runtimes": {str(r.number): r.runtime for r in results},
    }
    _emit_json(args, "verify", body)
    return EXIT_OK if body["passed"] else EXIT_FAIL


def build_parser():
    parser = argparse.ArgumentParser(prog="jacobi-ensembles", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a tridiagonal ensemble matrix as CSV")
    _add_ensemble_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("spectrum", help="spectral measure of a matrix as CSV")
    _add_ensemble_flags(p, required=False)
    p.add_argument("--matrix", help="CSV with columns index,diag,offdiag")
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("density", help="limit-law density table")
    p.add_argument("--law", choices=("sc", "mp", "kmk"), required=True)
    p.add_argument("--gamma", type=float)
    p.add_argument("--ka", type=float, default=0.0)
    p.add_argument("--kb", type=float, default=0.0)
    p.add_argument("--grid", type=int, default=201)
    p.add_argument("--inversion", action="store_true", help="add a Stieltjes-inversion column")
    p.add_argument("--eps", default="1e-2,1e-3,1e-4", help="decreasing eps schedule")
    p.add_argument("--out")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("clt", help="CLT experiment for a polynomial linear statistic")
    _add_ensemble_flags(p)
    p.add_argument("--f", required=True, help="ascending coefficients, e.g. 0,0,1 for x^2")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--workers", type=int, default=None, help=f"default from ${WORKERS_ENV} or 1")
    p.add_argument("--out")
    p.set_defaults(func=cmd_clt)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    p.add_argument("--suite", choices=("quick", "full"), default="quick")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "workers", None) is None and hasattr(args, "workers"):
        args.workers = default_workers()
    try:
        return args.func(args)
    except (UsageError, ParameterError, DomainError, KeyError) as exc:
        # parser.error prints usage and exits with status 2
        try:
            parser.error(str(exc))
        except SystemExit as stop:
            return stop.code
    except (NumericalError, ExperimentError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    logging.basicConfig(level=logging.WARNING)
    sys.exit(main())
