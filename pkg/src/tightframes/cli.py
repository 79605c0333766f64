"""Command-line front end.

Exit codes: 0 success, 1 I/O or parse failure, 2 mathematical precondition
failure.
"""

import argparse
import json
import sys

import numpy as np

from . import __version__
from .diag_stream import EndOfStream, InfeasiblePrefix, run_prefix
from .documents import (
    DocumentError,
    frame_doc,
    load_axes,
    load_diag,
    load_frame,
    load_matrix,
    read_document,
    write_document,
)
from .ellipsoid import (
    Ellipsoid,
    membership,
    onb_on_ellipsoid,
    tight_frame_on_ellipsoid,
    to_axes,
    to_operator,
)
from .errors import FrameError, InvalidInput, NotDecomposable
from .frames import Frame, etf_synthesize, frame_bounds, frame_operator, parsevalize, spherical_frame
from .operator_core import ToleranceConfig, frob
from .projection import check_decomposable, decompose_rank_one

EXIT_OK, EXIT_IO, EXIT_MATH = 0, 1, 2


class MathFailure(Exception):
    """Precondition failure that should surface as exit code 2 with a reason."""

    def __init__(self, reason, message):
        self.reason = reason
        super().__init__(message)


def _axes_arg(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad coefficient list {text!r}") from exc


def _ellipsoid_from_doc(doc, cfg):
    if doc["kind"] == "axes":
        return Ellipsoid.from_axes(load_axes(doc))
    if doc["kind"] == "matrix":
        try:
            return Ellipsoid.from_operator(load_matrix(doc, cfg), cfg)
        except InvalidInput as exc:
            raise DocumentError(str(exc)) from exc
    raise DocumentError(f"an ellipsoid file must be an axes or matrix document, got {doc['kind']}")


def _save_plot(args, vectors, D, title):
    if not args.plot:
        return
    if np.asarray(vectors).shape[1] > 3:
        print("note: --plot skipped, dimension exceeds 3", file=sys.stderr)
        return
    from .plot import save_svg

    save_svg(args.plot, vectors, D, title)


def cmd_decompose(args, cfg):
    A = load_matrix(read_document(args.matrix), cfg)
    report = check_decomposable(A, cfg)
    out = {"verdict": report.verdict, "trace_k": report.k, "rank": report.rank,
           "trace_residual": report.trace_residual, "norm": report.norm}
    if not report.ok:
        raise MathFailure(report.verdict, f"operator is not decomposable: {report.verdict}")
    k = report.k if args.k is None else args.k
    try:
        dec = decompose_rank_one(A, k, cfg)
    except NotDecomposable as exc:
        raise MathFailure(f"NotDecomposable({exc.reason})", str(exc)) from exc
    if args.out:
        write_document(args.out, frame_doc(dec.factors, "decomposition", dec.target, cfg))
    out.update(k=len(dec), residual=dec.residual(), max_norm_error=dec.norm_error())
    return out


def _etf_report(E, F, K_measured, k):
    Q = E.quadratic_form()
    formula = k / float(np.trace(Q))
    S = frame_operator(F)
    report = {
        "k": k,
        "frame_bound": K_measured,
        "formula_k_over_r": formula,
        "max_membership_residual": max(membership(E, v) for v in F.vectors),
        "tightness_residual": frob(S - formula * np.eye(S.shape[0])),
    }
    if not E.degenerate:
        report["formula_k_over_trace_T_inv2"] = formula
    return report


def cmd_etf(args, cfg):
    if (args.axes is None) == (args.operator is None):
        raise DocumentError("give exactly one of --axes or --operator")
    if args.axes is not None:
        try:
            E = Ellipsoid.from_axes(args.axes)
        except InvalidInput as exc:
            raise DocumentError(str(exc)) from exc
    else:
        E = _ellipsoid_from_doc(read_document(args.operator), cfg)
    k = args.length
    if k < E.dim:
        raise MathFailure("LengthBelowDimension", f"length {k} is below dimension {E.dim}")
    if args.method == "rotation":
        axes = to_axes(E, cfg)
        F = Frame(tight_frame_on_ellipsoid(axes.coeffs, k, cfg) @ axes.basis.T, "etf")
    else:
        if E.degenerate:
            raise MathFailure("Degenerate", "decomposition method needs a non-degenerate ellipsoid")
        F, _ = etf_synthesize(to_operator(E, cfg), k, cfg)
    bounds = frame_bounds(F, cfg)
    if args.out:
        write_document(args.out, frame_doc(F.vectors, cfg=cfg))
    _save_plot(args, F.vectors, E.quadratic_form(), f"tight frame, k={k}")
    report = _etf_report(E, F, bounds.frame_bound, k)
    report.update(method=args.method, tight=bounds.tight)
    return report


def cmd_onb(args, cfg):
    a = np.asarray(args.axes, dtype=float)
    if a.size == 0:
        raise DocumentError("--axes needs at least one coefficient")
    try:
        V = onb_on_ellipsoid(a, cfg)
    except InvalidInput as exc:
        raise MathFailure("InvalidCoefficients", str(exc)) from exc
    E = Ellipsoid.from_axes(a)
    if args.out:
        write_document(args.out, frame_doc(V, cfg=cfg))
    _save_plot(args, V, E.quadratic_form(), "orthonormal basis on the ellipsoid")
    return {
        "gram_residual": frob(V @ V.T - np.eye(len(a))),
        "max_membership_residual": max(membership(E, v) for v in V),
    }


def cmd_analyze(args, cfg):
    F = load_frame(read_document(args.frame))
    b = frame_bounds(F, cfg)
    report = {"lower_bound": b.lower_bound, "upper_bound": b.upper_bound, "tight": b.tight,
              "frame_bound": b.frame_bound, "parseval": b.parseval, "complete": b.complete,
              "length": len(F), "dim": F.dim}
    D = None
    if args.ellipsoid:
        E = _ellipsoid_from_doc(read_document(args.ellipsoid), cfg)
        if E.dim != F.dim:
            raise MathFailure("DimensionMismatch", "ellipsoid and frame dimensions differ")
        report["membership_residuals"] = [membership(E, v) for v in F.vectors]
        D = E.quadratic_form()
    _save_plot(args, F.vectors, D, "frame")
    return report


def cmd_parseval(args, cfg):
    F = load_frame(read_document(args.frame))
    if not frame_bounds(F, cfg).complete:
        raise MathFailure("Incomplete", "frame does not span the space")
    P = parsevalize(F, cfg)
    if args.out:
        write_document(args.out, frame_doc(P.vectors, cfg=cfg))
    return {"parseval_residual": frob(frame_operator(P) - np.eye(P.dim))}


def cmd_spherical(args, cfg):
    S = load_matrix(read_document(args.operator), cfg)
    k = args.length
    if k < S.shape[0]:
        raise MathFailure("LengthBelowDimension", f"length {k} is below dimension {S.shape[0]}")
    try:
        F, radius = spherical_frame(S, k, cfg)
    except NotDecomposable as exc:
        raise MathFailure(f"NotDecomposable({exc.reason})", str(exc)) from exc
    if args.out:
        write_document(args.out, frame_doc(F.vectors, cfg=cfg))
    _save_plot(args, F.vectors, None, f"spherical frame, radius {radius:.6g}")
    norms = np.linalg.norm(F.vectors, axis=1)
    return {"radius": radius, "max_norm_deviation": float(np.max(np.abs(norms - radius))),
            "operator_residual": frob(frame_operator(F) - S)}


def cmd_diagstream(args, cfg):
    spec = load_diag(read_document(args.diag), args.alpha)
    try:
        dec, residual, state = run_prefix(spec, args.blocks, args.k, cfg)
    except InfeasiblePrefix as exc:
        raise MathFailure("InfeasiblePrefix", f"{exc}; max feasible prefix {exc.max_prefix}") from exc
    except EndOfStream as exc:
        raise MathFailure("EndOfStream", str(exc)) from exc
    if args.out:
        write_document(args.out, frame_doc(dec.factors.reshape(len(dec), dec.dim), "decomposition",
                                           dec.target, cfg))
    return {
        "k": state.k,
        "permutation": list(state.permutation),
        "L": [b.L for b in state.blocks],
        "carry": [b.carry for b in state.blocks],
        "projections": len(dec),
        "residual": dec.residual(),
        "tail_length": len(residual.tail),
    }


def cmd_selftest(args, cfg):
    """Randomized smoke checks of the main constructions."""
    rng = np.random.default_rng(args.seed)
    worst = {"tight_frame": 0.0, "decompose": 0.0}
    for _ in range(args.trials):
        n = int(rng.integers(1, 7))
        a = rng.uniform(0.1, 3.0, n)
        k = n + int(rng.integers(0, 4))
        U = tight_frame_on_ellipsoid(a, k, cfg)
        worst["tight_frame"] = max(worst["tight_frame"],
                                   frob(U.T @ U - (k / a.sum()) * np.eye(n)))
        G = rng.standard_normal((n, n))
        A = G @ G.T
        A *= (n + 1) / np.trace(A)
        worst["decompose"] = max(worst["decompose"], decompose_rank_one(A, n + 1, cfg).residual())
    return {"seed": args.seed, "trials": args.trials, **worst}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    defaults = ToleranceConfig()
    common.add_argument("--tol-rank", type=float, default=defaults.tol_rank)
    common.add_argument("--tol-recon", type=float, default=defaults.tol_recon)
    common.add_argument("--tol-psd", type=float, default=defaults.tol_psd)
    common.add_argument("--tol-orth", type=float, default=defaults.tol_orth)
    common.add_argument("--tol-bisect", type=float, default=defaults.tol_bisect)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized self-tests")
    common.add_argument("--out", help="output document path")
    common.add_argument("--plot", metavar="SVG", help="draw frame and surface (n <= 3)")
    common.add_argument("--json", action="store_true", help="print the report as JSON")

    parser = argparse.ArgumentParser(prog="tightframes", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", parents=[common], help="rank-one projection decomposition")
    p.add_argument("matrix")
    p.add_argument("--k", type=int, help="number of projections (default: rounded trace)")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("etf", parents=[common], help="tight frame on an ellipsoid")
    p.add_argument("--axes", type=_axes_arg)
    p.add_argument("--operator", help="matrix or axes document describing the ellipsoid")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--method", choices=("rotation", "decomposition"), default="rotation")
    p.set_defaults(func=cmd_etf)

    p = sub.add_parser("onb", parents=[common], help="orthonormal basis on an ellipsoid")
    p.add_argument("--axes", type=_axes_arg, required=True)
    p.set_defaults(func=cmd_onb)

    p = sub.add_parser("analyze", parents=[common], help="frame bounds and membership")
    p.add_argument("frame")
    p.add_argument("--ellipsoid")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("parseval", parents=[common], help="Parseval normalization")
    p.add_argument("frame")
    p.set_defaults(func=cmd_parseval)

    p = sub.add_parser("spherical", parents=[common], help="equal-norm frame for an operator")
    p.add_argument("operator")
    p.add_argument("--length", type=int, required=True)
    p.set_defaults(func=cmd_spherical)

    p = sub.add_parser("diagstream", parents=[common], help="block decomposition of a diagonal")
    p.add_argument("diag")
    p.add_argument("--alpha", type=float, help="override the document's alpha")
    p.add_argument("--blocks", type=int, required=True)
    p.add_argument("--k", type=int, help="override the block parameter")
    p.set_defaults(func=cmd_diagstream)

    p = sub.add_parser("selftest", parents=[common], help="randomized consistency checks")
    p.add_argument("--trials", type=int, default=20)
    p.set_defaults(func=cmd_selftest)
    return parser


def _emit(report, as_json, stream=None):
    stream = stream or sys.stdout
    if as_json:
        print(json.dumps(report), file=stream)
        return
    for key, value in report.items():
        if isinstance(value, float):
            value = f"{value:.6g}"
        print(f"{key}: {value}", file=stream)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_IO
    try:
        cfg = ToleranceConfig(args.tol_rank, args.tol_psd, args.tol_recon, args.tol_orth,
                              args.tol_bisect)
        report = args.func(args, cfg)
    except MathFailure as exc:
        _emit({"status": "failed", "reason": exc.reason, "message": str(exc)}, args.json)
        return EXIT_MATH
    except (DocumentError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvalidInput as exc:
        # tolerance flags and command-line values that failed validation
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except FrameError as exc:
        _emit({"status": "failed", "reason": type(exc).__name__, "message": str(exc)}, args.json)
        return EXIT_MATH
    _emit({"status": "ok", **report}, args.json)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
