"""Command line front end.

Subcommands: svd (decompose a matrix), eigen (tied-mode eigendecomposition
of a symmetric PSD matrix), probe (one circuit evaluation, probability
table), gradcheck (parameter-shift derivatives against finite differences).

Exit codes: 0 success, 2 bad input, 3 convergence failure (a report is
still written when requested), 4 internal consistency violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import warnings

import numpy as np

from . import __version__
from .ansatz import AnsatzParams, default_q_blocks
from .circuit import probe_exact, probe_shots
from .driver import (
    OptimizerConfig,
    eigendecompose_psd,
    extract,
    optimize,
    pseudoinverse,
)
from .errors import (
    CalibrationMismatchError,
    ConvergenceFailureError,
    DegenerateReferenceError,
    ImpossibleOutcomeError,
    NoProgressWarning,
    NormViolationError,
    NoSurvivingShotsError,
    NotSymmetricPSDError,
    PostselectionImpossibleError,
    VanishingP00Error,
    VqsvdError,
)
from .estimator import evaluate, gradient, objective_direct, recover, recover_standard_error
from .matrix_core import DEFAULT_PIVOT_TOL, load_matrix, make_weights, prepare, restore_factors
from .oracle import jacobi_svd

LARGE_N = 4
FD_STEP = 1e-5
GRADCHECK_TOL = 1e-6

CONSISTENCY_ERRORS = (
    CalibrationMismatchError,
    DegenerateReferenceError,
    ImpossibleOutcomeError,
    NormViolationError,
    NoSurvivingShotsError,
    PostselectionImpossibleError,
    VanishingP00Error,
)


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    seed = int(np.random.SeedSequence().generate_state(1)[0])
    print(f"seed: {seed} (auto-generated)")
    return seed


def _load_prepared(args):
    matrix = load_matrix(args.matrix)
    prep = prepare(matrix, pivot_tol=args.pivot_tol)
    if prep.n > LARGE_N and not args.allow_large:
        gib = 16.0 * 2 ** (5 * prep.n + 3) / 2**30
        raise SystemExit(
            _fail(
                f"n={prep.n} needs a {5 * prep.n + 3}-qubit statevector "
                f"(about {gib:.0f} GiB); pass --allow-large to proceed",
                2,
            )
        )
    return prep


def _weights_for(args, prep):
    return make_weights(prep.dim, scheme=args.weights, t=args.rank)


def _config_from(args, seed) -> OptimizerConfig:
    return OptimizerConfig(
        learning_rate=args.lr,
        max_iters=args.max_iters,
        epsilon=args.epsilon,
        restarts=args.restarts,
        init_scale=args.init_scale,
        seed=seed,
        eval_mode=args.mode,
        shots=args.shots,
        sampling=args.sampling,
        use_adam=args.adam,
    )


def _load_params(args, prep) -> AnsatzParams:
    q_blocks = args.q_blocks or default_q_blocks(prep.n)
    tie = "tied" if getattr(args, "tied", False) else "independent"
    if args.params is None:
        return AnsatzParams.zeros(prep.n, q_blocks, tie_mode=tie)
    values = np.loadtxt(args.params, ndmin=1, dtype=np.float64)
    per_side = prep.n * q_blocks
    expected = per_side if tie == "tied" else 2 * per_side
    if values.size != expected:
        raise SystemExit(
            _fail(
                f"params file has {values.size} angles, expected {expected} "
                f"(n={prep.n}, q_blocks={q_blocks}, {tie})",
                2,
            )
        )
    if tie == "tied":
        return AnsatzParams(prep.n, q_blocks, values, tie_mode="tied")
    return AnsatzParams(prep.n, q_blocks, values[:per_side], values[per_side:])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


def _write_report(path, report) -> None:
    if path is None:
        return
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(_jsonable(report), handle, indent=2, sort_keys=True)
        handle.write("\n")
    print(f"report written to {path}")


def _write_trace(path, trace) -> None:
    if path is None or trace is None:
        return
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("iter,L,grad_norm\n")
        for iteration, l_value, grad_norm, _checksum in trace.records:
            handle.write(f"{iteration},{l_value!r},{grad_norm!r}\n")
    print(f"trace written to {path}")


def _decomposition_report(args, prep, weights, seed, config, result, kind):
    trace = result.trace
    values_key = "eigenvalues" if kind == "eigen" else "singular_values"
    values = result.singular_values_original
    if values is None:
        values = result.d
    report = {
        "command": kind,
        "version": __version__,
        "matrix_path": args.matrix,
        "n": prep.n,
        "dim": prep.dim,
        "scale": prep.scale,
        "weights": {"scheme": weights.scheme, "t": weights.t, "q": weights.q},
        "config": {
            "learning_rate": config.learning_rate,
            "max_iters": config.max_iters,
            "epsilon": config.epsilon,
            "restarts": config.restarts,
            "init_scale": config.init_scale,
            "eval_mode": config.eval_mode,
            "shots": config.shots if config.eval_mode == "shots" else None,
            "sampling": config.sampling if config.eval_mode == "shots" else None,
            "use_adam": config.use_adam,
            "q_blocks": args.q_blocks or default_q_blocks(prep.n),
        },
        "seed": seed,
        "result": {
            values_key: values,
            "residual": result.residual,
            "d_working": result.d,
        },
        "optimization": {
            "converged": trace.converged,
            "chosen_restart": trace.chosen_restart,
            "iterations": trace.iterations,
            "restart_final_values": trace.restart_final_values,
            "final_l": trace.records[-1][1] if trace.records else None,
            "no_progress": trace.no_progress,
            "postselect_stats": trace.postselect_stats,
        },
        "status": "ok" if trace.converged else "max-iters",
        "timing": {"wall_time": trace.wall_time},
    }
    return report


def cmd_svd(args) -> int:
    prep = _load_prepared(args)
    weights = _weights_for(args, prep)
    seed = _resolve_seed(args)
    config = _config_from(args, seed)
    tie = "tied" if args.tied else "independent"
    if args.verify and np.iscomplexobj(prep.original):
        return _fail("--verify needs a real matrix (the check oracle is real-only)", 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NoProgressWarning)
        params, trace = optimize(
            prep, weights, q_blocks=args.q_blocks, tie_mode=tie, config=config
        )
    result = extract(prep, weights, params, trace=trace)
    result = restore_factors(result, prep)
    report = _decomposition_report(args, prep, weights, seed, config, result, "svd")
    sigma = result.singular_values_original
    print(f"singular values: {np.array2string(sigma, precision=6)}")
    print(f"residual (Frobenius): {result.residual:.3e}")
    print(
        f"restart {trace.chosen_restart} of {config.restarts}, "
        f"{trace.iterations} iterations, converged={trace.converged}"
    )
    if args.verify:
        oracle = jacobi_svd(prep.padded_original().real)
        err = float(np.max(np.abs(sigma - oracle.sigma)))
        report["verify"] = {"oracle_singular_values": oracle.sigma, "max_abs_error": err}
        print(f"verify: max singular value error {err:.3e}")
    if args.pinv_out is not None:
        plus = pseudoinverse(result)
        np.savetxt(args.pinv_out, plus, delimiter=",")
        print(f"pseudoinverse written to {args.pinv_out}")
    _write_trace(args.trace_out, trace)
    _write_report(args.report_out, report)
    if trace.no_progress:
        print("note: best objective stayed below the identity-angle value", file=sys.stderr)
    if not trace.converged:
        print("error: hit max_iters before |dL| fell under epsilon", file=sys.stderr)
        return 3
    return 0


def cmd_eigen(args) -> int:
    prep = _load_prepared(args)
    weights = _weights_for(args, prep)
    seed = _resolve_seed(args)
    config = _config_from(args, seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NoProgressWarning)
        result = eigendecompose_psd(prep, weights, q_blocks=args.q_blocks, config=config)
    result = restore_factors(result, prep)
    report = _decomposition_report(args, prep, weights, seed, config, result, "eigen")
    print(f"eigenvalues: {np.array2string(result.singular_values_original, precision=6)}")
    print(f"residual (Frobenius): {result.residual:.3e}")
    _write_trace(args.trace_out, result.trace)
    _write_report(args.report_out, report)
    if result.trace.no_progress:
        print("note: best objective stayed below the identity-angle value", file=sys.stderr)
    if not result.trace.converged:
        print("error: hit max_iters before |dL| fell under epsilon", file=sys.stderr)
        return 3
    return 0


def _print_probe(tag, probe):
    print(f"[{tag}] outcome probabilities (k, b):")
    for key in ("p00", "p01", "p10", "p11"):
        print(f"  {key[1]} {key[2]}   {getattr(probe, key):.6f}")
    sample = recover(probe)
    print(f"  reference a00_tilde = {probe.a00_tilde:.10f}")
    print(f"  postselect_prob     = {probe.postselect_prob:.10f}")
    print(f"  G^2                 = {sample.g_squared:.10f}")
    print(f"  L                   = {sample.l_value:.10f}")
    if probe.mode == "shots":
        se = recover_standard_error(probe)
        print(f"  std error of L      = {se:.3e}")
        if probe.discarded:
            print(f"  discarded shots     = {probe.discarded}")
    return sample


def cmd_probe(args) -> int:
    prep = _load_prepared(args)
    weights = _weights_for(args, prep)
    params = _load_params(args, prep)
    report = {
        "command": "probe",
        "version": __version__,
        "matrix_path": args.matrix,
        "n": prep.n,
        "weights": {"scheme": weights.scheme, "t": weights.t, "q": weights.q},
        "params_checksum": params.checksum(),
        "mode": args.mode,
    }
    if args.mode in ("exact", "both"):
        probe = probe_exact(prep, weights, params)
        sample = _print_probe("exact", probe)
        report["exact"] = {
            "probabilities": probe.probabilities,
            "l_value": sample.l_value,
            "g_squared": sample.g_squared,
            "postselect_prob": probe.postselect_prob,
        }
    if args.mode in ("shots", "both"):
        seed = _resolve_seed(args)
        probe = probe_shots(
            prep, weights, params, shots=args.shots, seed=seed, sampling=args.sampling
        )
        sample = _print_probe(f"shots={args.shots}", probe)
        report["shots"] = {
            "probabilities": probe.probabilities,
            "l_value": sample.l_value,
            "g_squared": sample.g_squared,
            "seed": seed,
            "sampling": args.sampling,
            "count": args.shots,
            "discarded": probe.discarded,
            "std_error": recover_standard_error(probe),
        }
    _write_report(args.report_out, report)
    return 0


def cmd_gradcheck(args) -> int:
    prep = _load_prepared(args)
    weights = _weights_for(args, prep)
    params = _load_params(args, prep)
    seed = _resolve_seed(args) if args.mode == "shots" else args.seed
    shift_grad = gradient(
        prep, weights, params, mode=args.mode, shots=args.shots, seed=seed, sampling=args.sampling
    )

    def direct_l(p):
        return objective_direct(prep, weights, p).l_value

    fd_grad = np.zeros(params.num_free)
    for k in range(params.num_free):
        up = direct_l(params.shifted(k, FD_STEP))
        down = direct_l(params.shifted(k, -FD_STEP))
        fd_grad[k] = (up - down) / (2 * FD_STEP)
    diff = np.abs(shift_grad - fd_grad)
    worst = float(diff.max())
    print(f"{params.num_free} free angles, parameter-shift route: {args.mode}")
    print("  k   shift-rule        finite-diff       |diff|")
    for k in range(params.num_free):
        print(f"  {k:<3d} {shift_grad[k]: .10f}    {fd_grad[k]: .10f}    {diff[k]:.3e}")
    print(f"max |difference| = {worst:.3e}")
    report = {
        "command": "gradcheck",
        "version": __version__,
        "matrix_path": args.matrix,
        "mode": args.mode,
        "shift_rule": shift_grad,
        "finite_difference": fd_grad,
        "max_abs_difference": worst,
    }
    if args.mode == "shots":
        se = 0.5 * recover_standard_error(
            probe_shots(prep, weights, params, shots=args.shots, seed=seed, sampling=args.sampling)
        )
        tol = 5.0 * se * np.sqrt(2.0)
        report["statistical_tolerance"] = tol
        _write_report(args.report_out, report)
        print(f"statistical tolerance (5 sigma per component): {tol:.3e}")
        return 0
    _write_report(args.report_out, report)
    if worst >= GRADCHECK_TOL:
        print(f"FAIL: max difference {worst:.3e} >= {GRADCHECK_TOL:.0e}", file=sys.stderr)
        return 3
    print(f"PASS: max difference {worst:.3e} < {GRADCHECK_TOL:.0e}")
    return 0


def _add_common(parser, modes, default_mode):
    parser.add_argument("matrix", help="matrix file (CSV, or whitespace table of [re,im] pairs)")
    parser.add_argument("--weights", choices=("linear", "geometric"), default="linear")
    parser.add_argument("--rank", type=int, default=None, help="number of nonzero weights t")
    parser.add_argument("--q-blocks", type=int, default=None, help="ansatz depth Q per side")
    parser.add_argument("--mode", choices=modes, default=default_mode)
    parser.add_argument("--shots", type=int, default=100_000)
    parser.add_argument(
        "--sampling", choices=("postselected", "raw"), default="postselected"
    )
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--pivot-tol", type=float, default=DEFAULT_PIVOT_TOL)
    parser.add_argument("--allow-large", action="store_true", help="lift the n>4 memory guard")
    parser.add_argument("--report-out", default=None, help="write a JSON report here")


def _add_optimizer(parser):
    parser.add_argument("--lr", type=float, default=0.3, help="ascent step size")
    parser.add_argument("--max-iters", type=int, default=5000)
    parser.add_argument("--epsilon", type=float, default=1e-8, help="|dL| stopping threshold")
    parser.add_argument("--restarts", type=int, default=3)
    parser.add_argument("--init-scale", type=float, default=0.1)
    parser.add_argument("--adam", action="store_true", help="adaptive moment steps")
    parser.add_argument("--trace-out", default=None, help="write per-iteration CSV here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqsvd",
        description="variational singular value decomposition on a dense statevector simulator",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_svd = sub.add_parser("svd", help="decompose a matrix")
    _add_common(p_svd, ("exact", "shots", "direct"), "exact")
    _add_optimizer(p_svd)
    p_svd.add_argument("--tied", action="store_true", help="share angles between the two sides")
    p_svd.add_argument("--verify", action="store_true", help="compare against a Jacobi oracle")
    p_svd.add_argument("--pinv-out", default=None, help="write the pseudoinverse as CSV here")
    p_svd.set_defaults(func=cmd_svd)

    p_eig = sub.add_parser("eigen", help="eigendecompose a symmetric PSD matrix")
    _add_common(p_eig, ("exact", "shots", "direct"), "exact")
    _add_optimizer(p_eig)
    p_eig.set_defaults(func=cmd_eigen)

    p_probe = sub.add_parser("probe", help="one circuit evaluation, probability table")
    _add_common(p_probe, ("exact", "shots", "both"), "exact")
    p_probe.add_argument("--params", default=None, help="flat angle file, alpha block then beta")
    p_probe.add_argument("--tied", action="store_true")
    p_probe.set_defaults(func=cmd_probe)

    p_grad = sub.add_parser("gradcheck", help="shift-rule gradient vs finite differences")
    _add_common(p_grad, ("exact", "shots", "direct"), "exact")
    p_grad.add_argument("--params", default=None, help="flat angle file, alpha block then beta")
    p_grad.add_argument("--tied", action="store_true")
    p_grad.set_defaults(func=cmd_gradcheck)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        code = args.func(args)
    except SystemExit as exc:
        return 0 if exc.code is None else int(exc.code)
    except ConvergenceFailureError as exc:
        return _fail(str(exc), 3)
    except CONSISTENCY_ERRORS as exc:
        return _fail(f"{type(exc).__name__}: {exc}", 4)
    except (VqsvdError, OSError, ValueError) as exc:
        return _fail(str(exc), 2)
    if code == 0:
        print(f"done in {time.perf_counter() - t0:.2f}s")
    return code


def entry_point() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entry_point()
