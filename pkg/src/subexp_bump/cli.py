"""Command-line front end.

    subexp-bump resolve --delta 0.5 --C 4
    subexp-bump pipeline --delta 0.5 --C 4 --out-dir run1
    subexp-bump asymptotics --A 1 --B 1 --kmin 50 --kmax 150

Exit status: 0 when everything passed, 1 when a property check failed,
2 on usage or numerical errors.
"""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .asymptotics import AsymptoticModel, asymptotic_value, fit_constant
from .construct import GridConfig, run_pipeline
from .errors import SubexpBumpError
from .fourier import TransformResult, transform_many
from .params import BumpParams, DecaySpec, resolve_params
from .verify import full_report

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2

ARTIFACT_FILES = {
    "phi_hat.csv": ("phiHat", "Transform"),
    "f_hat.csv": ("fHat", "TailIntegral"),
    "F_hat.csv": ("bigFHat", "Convolution"),
    "f_space.csv": ("fSpace", "InverseTransform"),
    "F_space.csv": ("bigFSpace", "Square"),
}


def _fmt(x):
    return format(float(x), ".17g")


def write_sampled(path, sf, default_method):
    """Write ``node,value,errEstimate,method`` rows with 17 significant digits."""
    err = sf.err if sf.err is not None else np.zeros(len(sf))
    methods = sf.method if sf.method is not None else [default_method] * len(sf)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "value", "errEstimate", "method"])
        for k, v, e, m in zip(sf.nodes, sf.values, err, methods):
            w.writerow([_fmt(k), _fmt(v), _fmt(e), m])


def _spec(args):
    return DecaySpec(args.delta, args.C, args.epsilon)


def cmd_resolve(args):
    params = resolve_params(_spec(args))
    print(json.dumps(params.to_dict(), sort_keys=True, indent=None if args.json else 2))
    return EXIT_OK


def cmd_pipeline(args):
    spec = _spec(args)
    cfg = GridConfig(linear_dk=args.grid_linear_dk, geo_ratio=args.grid_geo_ratio,
                     kmax=args.kmax)
    artifacts = run_pipeline(spec, cfg)
    report = full_report(artifacts, spec)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, (attr, label) in ARTIFACT_FILES.items():
        write_sampled(out / name, getattr(artifacts, attr), label)
    (out / "report.json").write_text(report.to_json() + "\n")
    if args.json:
        print(report.to_json())
    else:
        for check, ok in sorted(report.passed.items()):
            print(f"{check:20s} {'pass' if ok else 'FAIL'}")
        print(f"artifacts written to {out}")
    return EXIT_OK if report.all_passed else EXIT_FAIL


def cmd_asymptotics(args):
    if not (0 < args.kmin < args.kmax):
        raise SubexpBumpError(f"empty window [{args.kmin}, {args.kmax}]")
    params = BumpParams.from_AB(args.A, args.B)
    model = AsymptoticModel(params)
    n = int(round((args.kmax - args.kmin) / args.dk)) + 1
    ks = np.linspace(args.kmin, args.kmax, n)
    vals, errs, methods = transform_many(params, ks)
    numeric = [TransformResult(k, v, m, e) for k, v, m, e in zip(ks, vals, methods, errs)]
    fit = fit_constant(numeric, model, (args.kmin, args.kmax))
    asym = asymptotic_value(model, ks)
    ratio = vals / asym
    rows = zip(ks, vals, asym, ratio)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "asymptotics.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "numeric", "asymptotic", "ratio"])
            w.writerows([_fmt(x) for x in r] for r in rows)
    elif not args.json:
        print("k,numeric,asymptotic,ratio")
        for r in rows:
            print(",".join(_fmt(x) for x in r))
    summary = {"A": params.A, "B": params.B, "window": [args.kmin, args.kmax],
               "c": fit.c, "residual": fit.residual, "ratioCV": fit.ratio_cv,
               "samples": fit.samples, "phaseOffset": model.phase_offset}
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="subexp-bump", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def spec_args(sp):
        sp.add_argument("--delta", type=float, default=0.5)
        sp.add_argument("--C", type=float, default=4.0)
        sp.add_argument("--epsilon", type=float, default=0.1)
        sp.add_argument("--json", action="store_true", help="compact JSON output")

    sp = sub.add_parser("resolve", help="print the bump parameters for a decay target")
    spec_args(sp)
    sp.set_defaults(func=cmd_resolve)

    sp = sub.add_parser("pipeline", help="build and verify the construction")
    spec_args(sp)
    sp.add_argument("--kmax", type=float, default=None, help="frequency grid end (default: automatic)")
    sp.add_argument("--grid-linear-dk", type=float, default=0.05)
    sp.add_argument("--grid-geo-ratio", type=float, default=1.02)
    sp.add_argument("--out-dir", default="out")
    sp.set_defaults(func=cmd_pipeline)

    sp = sub.add_parser("asymptotics", help="compare transforms with the leading asymptotics")
    sp.add_argument("--A", type=float, default=1.0)
    sp.add_argument("--B", type=float, default=1.0)
    sp.add_argument("--kmin", type=float, default=50.0)
    sp.add_argument("--kmax", type=float, default=150.0)
    sp.add_argument("--dk", type=float, default=0.05, help="frequency spacing of the samples")
    sp.add_argument("--out-dir", default=None, help="write the comparison table here")
    sp.add_argument("--json", action="store_true", help="print only the fit summary")
    sp.set_defaults(func=cmd_asymptotics)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SubexpBumpError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
