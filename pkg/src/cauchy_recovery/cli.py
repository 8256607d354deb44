"""Command-line front end: recover, measure, experiment, timing.

Exit codes: 0 success, 1 file/parse/configuration error, 2 zero entry
in the input matrix, 3 recovered points failed the separation check
(output is still written, flagged invalid).

The environment variable CAUCHY_RECOVER_THREADS caps internal
parallelism of the numeric kernels; it defaults to 1 so that repeated
runs are reproducible. It must take effect before the numeric modules
load, which is why the heavy imports below happen inside main().
"""

from __future__ import annotations

import argparse
import os
import sys

_THREAD_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
    "VECLIB_MAXIMUM_THREADS",
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ZERO_ENTRY = 2
EXIT_SEPARATION = 3

DEFAULT_DELTAS = tuple(10.0 ** (-k) for k in range(9, 0, -1))
DEFAULT_SIZES = tuple(range(100, 2001, 100))

EXPERIMENTS = {
    "1": ("multiplicative", (100,), DEFAULT_DELTAS),
    "1b": ("multiplicative", DEFAULT_SIZES, (1e-5,)),
    "2": ("additive_reciprocal", (100,), DEFAULT_DELTAS),
    "4": ("unbalanced_multiplicative", DEFAULT_SIZES, (1e-5,)),
    "5": ("worst_case_singular", DEFAULT_SIZES, (1e-5,)),
}


def _configure_threads() -> None:
    cap = os.environ.get("CAUCHY_RECOVER_THREADS", "1")
    for var in _THREAD_VARS:
        os.environ.setdefault(var, cap)
    # the env vars only act before the numeric libraries load; cap the
    # already-initialized pools too
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(limits=int(cap))
    except (ImportError, ValueError):
        pass


def _parse_sizes(text: str) -> list[int]:
    """Parse 'a:step:b' (inclusive) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"size range must be a:step:b, got {text!r}")
        a, step, b = (int(p) for p in parts)
        if step <= 0 or b < a:
            raise ValueError(f"invalid size range {text!r}")
        return list(range(a, b + 1, step))
    return [int(p) for p in text.split(",") if p.strip()]


def _parse_deltas(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cauchy-recover",
        description="Recover Cauchy matrix parameters and reproduce the recovery experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("recover", help="recover generator vectors from a matrix file")
    p.add_argument("--input", required=True, help="matrix file (comma-separated rows)")
    p.add_argument("--alg", type=int, choices=(1, 2, 3, 4), required=True)
    p.add_argument("--spec", default="decreasing", help="projector preset for --alg 3")
    p.add_argument("--spec-file", default=None, help='JSON file {"v": [...], "w": [...]}')
    p.add_argument("--out", required=True)

    p = sub.add_parser("measure", help="compute all Cauchyness measures of a matrix file")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("experiment", help="run one of the predefined recovery experiments")
    p.add_argument("--id", required=True, dest="experiment_id", help="one of 1, 1b, 2, 4, 5")
    p.add_argument("--n", type=int, default=None, help="single matrix size")
    p.add_argument("--sizes", default=None, help="a:step:b or comma list")
    p.add_argument("--delta", type=float, default=None, help="single noise level")
    p.add_argument("--deltas", default=None, help="comma list of noise levels")
    p.add_argument("--spec", default="decreasing")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", required=True)

    p = sub.add_parser("timing", help="time the n^2 and n^3 recoveries and fit power laws")
    p.add_argument("--sizes", required=True, help="a:step:b or comma list")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--no-fit", action="store_true", help="skip the power-law fit")
    p.add_argument(
        "--synthetic",
        default=None,
        metavar="C2:A2,C4:A4",
        help="test mode: report c*n**a instead of the clock",
    )
    p.add_argument("--out", required=True)

    return parser


def _load_spec(args, n: int):
    from .projectors import ProjectorSpec, preset_spec

    if args.spec_file:
        import json

        with open(args.spec_file, encoding="utf-8") as fh:
            data = json.load(fh)
        return ProjectorSpec(data["v"], data["w"])
    return preset_spec(args.spec, n)


def _certificate_dict(cert) -> dict:
    return {
        "beta": cert.beta,
        "valid": cert.valid,
        "rel_error_bound": cert.rel_error_bound,
        "separation_bound": cert.separation_bound,
        "stability_bound_frob": cert.stability_bound_frob,
        "stability_bound_max": cert.stability_bound_max,
    }


def cmd_recover(args) -> int:
    from . import matrixio
    from .diagnostics import certified_recovery
    from .displacement import recover_displacement
    from .model import SeparationFailure
    from .projectors import recover_cross, recover_oblique, recover_orthogonal

    A = matrixio.read_matrix(args.input)
    _require_zero_free(A)
    if args.alg == 1:
        pair = recover_cross(A)
    elif args.alg == 2:
        pair = recover_orthogonal(A)
    elif args.alg == 3:
        pair = recover_oblique(A, _load_spec(args, A.shape[0]))
    else:
        pair = recover_displacement(A)
    cert, checked = certified_recovery(A, pair)
    failed = isinstance(checked, SeparationFailure)
    payload = {
        "x": pair.x,
        "y": pair.y,
        "valid": not failed,
        "min_separation": checked.min_separation,
        "certificate": _certificate_dict(cert),
    }
    matrixio.write_json(args.out, payload)
    return EXIT_SEPARATION if failed else EXIT_OK


def cmd_measure(args) -> int:
    from . import matrixio
    from .diagnostics import diagnostics_report, third_singular_value_sandwich

    A = matrixio.read_matrix(args.input)
    _require_zero_free(A)
    report = diagnostics_report(A)
    lower, sigma3, upper = third_singular_value_sandwich(A)
    payload = {
        "kappa_f": report.kappa_f,
        "beta_f": report.beta_f,
        "sigma3": report.sigma3,
        "residual_max_alg1": report.residual_max_alg1,
        "residual_f_alg2": report.residual_f_alg2,
        "norm_max_A": report.norm_max_A,
        "norm_max_hinvA": report.norm_max_hinvA,
        "sigma3_sandwich": {"lower": lower, "sigma3": sigma3, "upper": upper},
    }
    matrixio.write_json(args.out, payload)
    return EXIT_OK


def cmd_experiment(args) -> int:
    from . import matrixio
    from .experiments import rows_to_csv, run_recovery_sweep

    if args.experiment_id not in EXPERIMENTS:
        raise ValueError(
            f"unknown experiment id {args.experiment_id!r}; expected one of {sorted(EXPERIMENTS)}"
        )
    kind, sizes, deltas = EXPERIMENTS[args.experiment_id]
    if args.n is not None:
        sizes = (args.n,)
    elif args.sizes is not None:
        sizes = tuple(_parse_sizes(args.sizes))
    if args.delta is not None:
        deltas = (args.delta,)
    elif args.deltas is not None:
        deltas = tuple(_parse_deltas(args.deltas))
    if not sizes or not deltas:
        raise ValueError("experiment grid is empty")
    rows = run_recovery_sweep(sizes, deltas, kind, spec=args.spec, seed=args.seed)
    matrixio.atomic_write_text(args.out, rows_to_csv(rows))
    return EXIT_OK


def _synthetic_runner(text: str):
    pairs = text.split(",")
    if len(pairs) != 2:
        raise ValueError("synthetic timing needs two c:a pairs")
    (c2, a2), (c4, a4) = (tuple(float(v) for v in p.split(":")) for p in pairs)

    def runner(fn, A):
        n = A.shape[0]
        if fn.__name__ == "recover_displacement":
            return c4 * n**a4
        return c2 * n**a2

    return runner


def cmd_timing(args) -> int:
    from . import matrixio
    from .experiments import power_law_fit, run_timing, timing_to_csv

    sizes = _parse_sizes(args.sizes)
    if not sizes:
        raise ValueError("timing needs at least one size")
    if not args.no_fit and len(set(sizes)) < 2:
        raise ValueError("power-law fit needs at least two distinct sizes (or pass --no-fit)")
    runner = _synthetic_runner(args.synthetic) if args.synthetic else None
    rows = run_timing(sizes, args.reps, runner=runner)
    matrixio.atomic_write_text(args.out, timing_to_csv(rows))
    if not args.no_fit:
        c2, a2 = power_law_fit([r.n for r in rows], [r.mean_alg2 for r in rows])
        c4, a4 = power_law_fit([r.n for r in rows], [r.mean_alg4 for r in rows])
        payload = {
            "alg2": {"c": c2, "exponent": a2},
            "alg4": {"c": c4, "exponent": a4},
        }
        matrixio.write_json(_fit_path(args.out), payload)
    return EXIT_OK


def _fit_path(out: str) -> str:
    return out + ".fit.json"


def _require_zero_free(A) -> None:
    from .errors import ZeroEntry
    from .linalg import first_zero_entry

    hit = first_zero_entry(A)
    if hit is not None:
        raise ZeroEntry(*hit)


def main(argv=None) -> int:
    _configure_threads()
    parser = build_parser()
    args = parser.parse_args(argv)

    from .errors import CauchyRecoveryError, MatrixFormatError, ZeroEntry

    handlers = {
        "recover": cmd_recover,
        "measure": cmd_measure,
        "experiment": cmd_experiment,
        "timing": cmd_timing,
    }
    try:
        return handlers[args.command](args)
    except ZeroEntry as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ZERO_ENTRY
    except (MatrixFormatError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CauchyRecoveryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
