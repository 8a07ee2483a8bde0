"""Command line interface.

Subcommands: solve-sdp, round, baseline, bench, gen-model, certify. The
default seed comes from the SPCAKIT_SEED environment variable when set and
is always overridden by an explicit --seed flag.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import baselines
from .bench import ALGORITHMS, BenchConfig, MatrixSource, emit_report, run_bench
from .certificates import (
    check_rank_one_conditions,
    check_sparse_top_eigvec,
    ssr_report,
    verify_kkt,
)
from .matio import FORMATS, load_matrix, save_matrix
from .rounding import multi_round
from .sdp import CgalConfig, solve_spca_sdp
from .statmodel import ModelSpec, gen_model

SEED_ENV_VAR = "SPCAKIT_SEED"


def _default_seed(fallback: int) -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return fallback
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from exc


def _emit(payload: dict, output: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    print(text)


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="path to the input matrix")
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument(
        "--center",
        action="store_true",
        help="center columns before forming the Gram matrix (gram_of_rows only)",
    )


def _add_sdp_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--iters", type=int, default=100, help="CGAL iterations")
    p.add_argument("--lambda0", type=float, default=1.0, help="smoothing scale")


def _cgal_config(args: argparse.Namespace, seed: int) -> CgalConfig:
    return CgalConfig(iterations=args.iters, lambda0=args.lambda0, seed=seed)


def _parse_int_list(raw: list[str]) -> list[int]:
    out: list[int] = []
    for chunk in raw:
        out += [int(x) for x in chunk.split(",") if x]
    return out


def cmd_solve_sdp(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _default_seed(0)
    A = load_matrix(args.input, args.format, args.center)
    sol = solve_spca_sdp(A, args.k, _cgal_config(args, seed))
    if args.save_w:
        np.save(args.save_w, sol.W)
    _emit(
        {
            "objective": sol.objective,
            "trace_residual": sol.trace_residual,
            "l1_residual": sol.l1_residual,
            "iterations_run": sol.iterations_run,
            "rank_bound": sol.rank_bound,
            "c0": ssr_report(sol.W, args.k).c0,
            "elapsed_seconds": sol.elapsed_seconds,
        },
        args.output,
    )
    return 0


def cmd_round(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _default_seed(42)
    A = load_matrix(args.input, args.format, args.center)
    if args.w:
        W = np.load(args.w)
    else:
        W = solve_spca_sdp(A, args.k, _cgal_config(args, seed)).W
    best = multi_round(A, W, args.k, args.trials, seed)
    _emit(
        {
            "objective": best.objective,
            "support": list(best.support),
            "z": best.z.tolist(),
            "feasible": best.feasible,
            "trial_id": best.trial_id,
            "trials": args.trials,
        },
        args.output,
    )
    return 0


def cmd_baseline(args: argparse.Namespace) -> int:
    A = load_matrix(args.input, args.format, args.center)
    result = baselines.BASELINE_FUNCS[args.algo](A, args.k)
    sol = result.solution
    _emit(
        {
            "algorithm": result.algorithm,
            "objective": sol.objective,
            "support": list(sol.support),
            "z": sol.z.tolist(),
            "elapsed_seconds": result.elapsed_seconds,
        },
        args.output,
    )
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _default_seed(42)
    sources = [
        MatrixSource(name=os.path.basename(path), path=path, format=args.format,
                     center=args.center)
        for path in args.input
    ]
    algorithms = tuple(args.algo) if args.algo else ALGORITHMS
    config = BenchConfig(
        sources=sources,
        ks=_parse_int_list(args.k),
        algorithms=algorithms,
        cgal=CgalConfig(iterations=args.iters, lambda0=args.lambda0, seed=seed),
        trials=args.trials,
        seed=seed,
    )
    records = run_bench(config)
    emit_report(records, args.output, args.report_format)
    failures = [r for r in records if r.error is not None]
    for rec in failures:
        print(
            f"error: {rec.dataset} k={rec.k} {rec.algorithm}: {rec.error}",
            file=sys.stderr,
        )
    print(f"wrote {args.output} ({len(records)} records, {len(failures)} failed)")
    return 1 if failures else 0


def cmd_gen_model(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _default_seed(0)
    spec = ModelSpec(
        d=args.d,
        k=args.k,
        n=args.n,
        sigma2=args.sigma2,
        spike_gap=args.gap,
        perturbation_column_bound=args.b,
        noise_kind=args.noise,
        perturbation_kind=args.perturbation,
    )
    inst = gen_model(spec, seed)
    save_matrix(inst.A, args.output, args.out_format)
    meta = {
        "d": spec.d,
        "k": spec.k,
        "n": spec.n,
        "sigma2": spec.sigma2,
        "spike_gap": spec.spike_gap,
        "perturbation_column_bound": spec.perturbation_column_bound,
        "noise_kind": spec.noise_kind,
        "perturbation_kind": spec.perturbation_kind,
        "seed": seed,
        "spike_support": list(range(spec.k)),
        "matrix_path": args.output,
    }
    if args.meta:
        with open(args.meta, "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(json.dumps(meta, indent=2, sort_keys=True))
    return 0


def cmd_certify(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else _default_seed(0)
    A = load_matrix(args.input, args.format, args.center)
    sol = solve_spca_sdp(A, args.k, _cgal_config(args, seed))
    tight, l1 = check_sparse_top_eigvec(A, args.k)
    payload: dict = {
        "sdp_objective": sol.objective,
        "ssr": ssr_report(sol.W, args.k).to_dict(),
        "top_eigvec_l1": l1,
        "relaxation_tight": tight,
    }
    if args.support:
        S = np.array(_parse_int_list(args.support))
        report = check_rank_one_conditions(A, S, args.k, args.gamma)
        payload["rank_one_conditions"] = report.to_dict()
        if report.certificate is not None:
            payload["kkt"] = verify_kkt(A, args.k, report.certificate).to_dict()
    _emit(payload, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spcakit",
        description="Sparse PCA via an SDP relaxation with randomized rounding",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve-sdp", help="solve the SDP relaxation")
    _add_input_flags(p)
    _add_sdp_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--save-w", default=None, help="write W as .npy")
    p.add_argument("--output", default=None, help="also write the JSON here")
    p.set_defaults(fn=cmd_solve_sdp)

    p = sub.add_parser("round", help="randomized rounding of an SDP solution")
    _add_input_flags(p)
    _add_sdp_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--w", default=None, help=".npy file with W; solved if omitted")
    p.add_argument("--trials", type=int, default=3000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", default=None)
    p.set_defaults(fn=cmd_round)

    p = sub.add_parser("baseline", help="run one deterministic baseline")
    _add_input_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument(
        "--algo",
        choices=sorted(baselines.BASELINE_FUNCS),
        required=True,
    )
    p.add_argument("--output", default=None)
    p.set_defaults(fn=cmd_baseline)

    p = sub.add_parser("bench", help="benchmark all algorithms on input matrices")
    p.add_argument("--input", action="append", required=True, help="repeatable")
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--center", action="store_true")
    p.add_argument("--k", action="append", required=True, help="repeatable or comma list")
    p.add_argument("--algo", action="append", choices=list(ALGORITHMS), default=None)
    _add_sdp_flags(p)
    p.add_argument("--trials", type=int, default=3000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", required=True)
    p.add_argument("--report-format", choices=["csv", "json"], default="csv")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("gen-model", help="sample a spiked-covariance instance")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--gap", type=float, default=1.0)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--noise", choices=["gaussian", "rademacher_scaled", "uniform_scaled"],
                   default="gaussian")
    p.add_argument("--perturbation", choices=["zero", "constant_column", "random_bounded"],
                   default="zero")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", required=True, help="where to write the matrix")
    p.add_argument("--out-format", choices=["csv", "matrix_market"], default="csv")
    p.add_argument("--meta", default=None, help="also write instance metadata JSON")
    p.set_defaults(fn=cmd_gen_model)

    p = sub.add_parser("certify", help="diagnostic certificates for a matrix")
    _add_input_flags(p)
    _add_sdp_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--support", action="append", default=None,
                   help="candidate support indices (comma list, repeatable)")
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--output", default=None)
    p.set_defaults(fn=cmd_certify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
