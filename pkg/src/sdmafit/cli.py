"""Command-line front door: fit, evaluate, export, and demo.

Exit codes: 0 on success, 2 for input problems (bad files, bad flags,
shape mismatches), 3 for numerical failures. All numeric output uses '.'
as the decimal separator regardless of locale.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .dataset import _is_numeric_line, _parse_row, load_csv
from .demo import demo_dataset
from .errors import (DimensionMismatch, EmptyFile, InputError,
                     NonPositiveValue, NumericalError)
from .fitting import FUNCTION_CLASSES, FitSpec, fit, rms_error
from .functions import SdmaParams, SmaParams, predict
from .modelio import load_model, save_constraints, save_model
from .sp_export import (export_gp, export_sp, render_constraints,
                        render_gp_constraint)


def _add_fit_flags(p, require_class: bool, default_order=None):
    if require_class:
        p.add_argument("--class", dest="function_class", required=True,
                       choices=FUNCTION_CLASSES,
                       help="function class to fit")
    else:
        p.add_argument("--class", dest="function_class", default="sdma",
                       choices=FUNCTION_CLASSES,
                       help="function class to fit (default sdma)")
    p.add_argument("--order", type=int, default=default_order,
                   help="fit order: sets both K and M")
    p.add_argument("--k", type=int, default=None,
                   help="convex-block term count (overrides --order)")
    p.add_argument("--m", type=int, default=None,
                   help="concave-block term count (overrides --order)")
    p.add_argument("--restarts", type=int, default=30,
                   help="random restarts (default 30)")
    p.add_argument("--seed", type=int, default=0,
                   help="random seed (default 0)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdmafit",
        description="Fit convex and difference-of-convex surrogate models "
                    "in log space and export them as geometric- or "
                    "signomial-programming constraints.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a model to CSV samples")
    p.add_argument("--input", required=True, help="CSV of samples, inputs "
                   "first and output last")
    p.add_argument("--space", choices=("linear", "log"), default="linear",
                   help="whether the CSV holds positive original values "
                        "(linear, log applied at ingestion) or is already "
                        "log transformed")
    _add_fit_flags(p, require_class=True)
    p.add_argument("--out", required=True, help="model file to write")
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("eval", help="evaluate a model file at points")
    p.add_argument("--model", required=True, help="model file")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--input", help="CSV of points (inputs only, or the "
                     "training layout with the output column ignored)")
    grp.add_argument("--point", help="one inline point: comma-separated "
                     "values")
    p.add_argument("--space", choices=("linear", "log"), default="linear",
                   help="space of the supplied points and of the printed "
                        "predictions")
    p.add_argument("--out", help="predictions CSV (default standard output)")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("export", help="export a fitted model as "
                       "original-variable constraints")
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--op", choices=("eq", "leq", "geq"), default="eq",
                   help="sense of the original constraint on w (default eq)")
    p.add_argument("--out", required=True, help="constraint file to write")
    p.set_defaults(handler=cmd_export)

    p = sub.add_parser("rms", help="report a model's RMS error on a CSV")
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--input", required=True, help="CSV of samples, same "
                   "layout as fit")
    p.add_argument("--space", choices=("linear", "log"), default="linear")
    p.set_defaults(handler=cmd_rms)

    p = sub.add_parser("demo2d", help="fit the built-in benchmark curve")
    _add_fit_flags(p, require_class=False, default_order=5)
    p.add_argument("--out", help="points+prediction CSV for plotting")
    p.set_defaults(handler=cmd_demo2d)

    return parser


def _resolve_terms(args):
    k = args.k if args.k is not None else args.order
    if k is None:
        raise InputError("give --order, or --k (and --m for difference "
                         "classes)")
    m = args.m if args.m is not None \
        else (args.order if args.order is not None else k)
    return k, m


def _print_fit_report(result):
    print(f"RMS: {result.rms_error * 100.0:.4g}%")
    print(f"rms_fraction: {result.rms_error:.17g}")
    print(f"restarts: {len(result.restart_costs)}")
    print(f"best_restart: {result.best_restart_index}")
    print(f"termination: {result.lm_report.termination.value}")


def cmd_fit(args) -> int:
    data = load_csv(args.input, space=args.space)
    k, m = _resolve_terms(args)
    spec = FitSpec(function_class=args.function_class, k_terms=k, m_terms=m,
                   restarts=args.restarts, rng_seed=args.seed)
    result = fit(data, spec)
    save_model(result.params, args.out)
    _print_fit_report(result)
    print(f"model written to: {args.out}")
    return 0


def _read_point_rows(path: str, n_dims: int) -> np.ndarray:
    """Rows of input points; a trailing output column is dropped."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    rows = []
    arity = None
    for i, line in enumerate(lines):
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if arity is None and not _is_numeric_line(fields):
            continue
        values = _parse_row(fields, i + 1)
        if arity is None:
            arity = len(values)
            if arity not in (n_dims, n_dims + 1):
                raise DimensionMismatch(
                    f"{path}: rows have {arity} fields but the model takes "
                    f"{n_dims} inputs (plus at most one output column)")
        elif len(values) != arity:
            raise DimensionMismatch(
                f"{path} row {i + 1}: expected {arity} fields, got "
                f"{len(values)}")
        rows.append(values[:n_dims])
    if not rows:
        raise EmptyFile(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def cmd_eval(args) -> int:
    model = load_model(args.model)
    n = model.n_dims
    if args.point is not None:
        fields = [f.strip() for f in args.point.split(",")]
        values = _parse_row(fields, 1)
        if len(values) != n:
            raise DimensionMismatch(f"point has {len(values)} values but "
                                    f"the model takes {n} inputs")
        points = np.asarray([values])
    else:
        points = _read_point_rows(args.input, n)
    if args.space == "linear":
        if np.any(points <= 0):
            raise NonPositiveValue("points must be strictly positive in "
                                   "linear space")
        preds = np.exp(predict(model, np.log(points)))
    else:
        preds = predict(model, points)
    lines = [",".join(repr(float(v)) for v in row) + f",{repr(float(p))}"
             for row, p in zip(points, preds)]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_export(args) -> int:
    model = load_model(args.model)
    names = [f"u{i + 1}" for i in range(model.n_dims)]
    if isinstance(model, SdmaParams):
        cs = export_sp(model, args.op)
        save_constraints(cs, args.out)
        print(render_constraints(cs, names))
        op_w, op_c, op_h = cs.operators
        print(f"operators line: w: {op_w.symbol}, p_convex: {op_c.symbol}, "
              f"p_concave: {op_h.symbol}")
    elif isinstance(model, SmaParams):
        gc = export_gp(model, args.op)
        save_constraints(gc, args.out)
        print(render_gp_constraint(gc, names))
        print(f"operators line: posynomial: {gc.operator.symbol}")
    else:
        raise InputError(
            f"class {model.function_class} has no inverse out of log space: "
            f"a hard max (and the difference built from it) does not "
            f"transform back to posynomials; fit sma or sdma to export")
    print(f"constraints written to: {args.out}")
    return 0


def cmd_rms(args) -> int:
    model = load_model(args.model)
    data = load_csv(args.input, space=args.space)
    rms = rms_error(model, data)
    print(f"RMS: {rms * 100.0:.4g}%")
    print(f"rms_fraction: {rms:.17g}")
    return 0


def cmd_demo2d(args) -> int:
    data = demo_dataset()
    k, m = _resolve_terms(args)
    spec = FitSpec(function_class=args.function_class, k_terms=k, m_terms=m,
                   restarts=args.restarts, rng_seed=args.seed)
    result = fit(data, spec)
    _print_fit_report(result)
    if args.out:
        preds = predict(result.params, data.x)
        with open(args.out, "w", encoding="utf-8") as fh:
            for xi, yi, pi in zip(data.x[:, 0], data.y, preds):
                fh.write(f"{repr(float(xi))},{repr(float(yi))},"
                         f"{repr(float(pi))}\n")
        print(f"points written to: {args.out}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.handler(args)
    except (InputError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
