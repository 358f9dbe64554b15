"""Timing comparison of the two kernel backends.

Times the four array primitives on a random register and then the full
readout probe with each backend bound, printing per-call milliseconds and
the numpy/numba ratio. The first numba call compiles, so every section
warms up before the clock starts.

Usage:
    python3 benchmarks/bench_kernels.py [--n 1 2] [--repeats 5] [--inner 20]
"""

import argparse
import time

import numpy as np

from vqsvd import kernels
from vqsvd.ansatz import AnsatzParams
from vqsvd.circuit import probe_exact
from vqsvd.matrix_core import make_weights, prepare

SQRT_HALF = 2.0**-0.5
BOUND_NAMES = ("ctrl_1q", "pattern_prob", "project_renorm", "marginal_probs")


def best_of(func, repeats, inner):
    """Minimum per-call seconds over `repeats` batches of `inner` calls."""
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(inner):
            func()
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def random_state(n, rng):
    size = 1 << (5 * n + 3)
    amps = rng.normal(size=size) + 1j * rng.normal(size=size)
    amps /= np.linalg.norm(amps)
    return amps


def kernel_cases(n, amps):
    """(label, callable-factory) pairs for one register size."""
    nq = 5 * n + 3
    target = nq // 2
    ctrl_mask = 1 << (nq - 1)
    positions = np.array([nq - 1, 0], dtype=np.int64)

    def single(mod):
        return lambda: mod.ctrl_1q(amps, 0, 0, target, SQRT_HALF, SQRT_HALF, SQRT_HALF, -SQRT_HALF)

    def controlled(mod):
        return lambda: mod.ctrl_1q(
            amps, ctrl_mask, 0, target, SQRT_HALF, SQRT_HALF, SQRT_HALF, -SQRT_HALF
        )

    def prob(mod):
        return lambda: mod.pattern_prob(amps, ctrl_mask, 0)

    def project(mod):
        scratch = np.empty_like(amps)

        def run():
            np.copyto(scratch, amps)
            mod.project_renorm(scratch, ctrl_mask, 0, 1.0)

        return run

    def marginal(mod):
        return lambda: mod.marginal_probs(amps, positions)

    return [
        ("single gate", single),
        ("controlled gate", controlled),
        ("pattern_prob", prob),
        ("project_renorm (incl. copy)", project),
        ("marginal_probs", marginal),
    ]


def bind(module):
    """Point the live kernel bindings at `module`, returning the old set."""
    old = {name: getattr(kernels, name) for name in BOUND_NAMES}
    for name in BOUND_NAMES:
        setattr(kernels, name, getattr(module, name))
    return old


def restore(old):
    for name, func in old.items():
        setattr(kernels, name, func)


def bench_probe(n, module, repeats, rng):
    dim = 1 << n
    prep = prepare(rng.normal(size=(dim, dim)))
    weights = make_weights(dim, "linear")
    params = AnsatzParams.random_init(n, 2, 0.5, rng)
    old = bind(module)
    try:
        probe_exact(prep, weights, params)
        per_call = best_of(lambda: probe_exact(prep, weights, params), repeats, max(1, 20 // n))
        check = probe_exact(prep, weights, params)
    finally:
        restore(old)
    return per_call, (check.p00, check.p01, check.p10, check.p11)


def fmt_row(label, t_numpy, t_numba, width=30):
    ratio = t_numpy / t_numba if t_numba > 0 else float("inf")
    return (
        f"  {label:<{width}} {t_numpy * 1e3:>10.4f} {t_numba * 1e3:>10.4f} {ratio:>8.2f}x"
    )


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, nargs="+", default=[1, 2], help="register scales to time")
    parser.add_argument("--repeats", type=int, default=5, help="timing batches per case")
    parser.add_argument("--inner", type=int, default=20, help="calls per batch for the kernels")
    parser.add_argument("--seed", type=int, default=7, help="rng seed for states and matrices")
    args = parser.parse_args(argv)

    numpy_mod = kernels.get_backend("numpy")
    try:
        numba_mod = kernels.get_backend("numba")
    except ImportError:
        parser.exit(1, "numba backend unavailable; install numba to compare\n")

    rng = np.random.default_rng(args.seed)
    print(f"active backend at import: {kernels.active_backend()}")
    for n in args.n:
        amps = random_state(n, rng)
        print(f"\nn={n} ({5 * n + 3} qubits, {amps.size} amplitudes)")
        print(f"  {'kernel':<30} {'numpy ms':>10} {'numba ms':>10} {'ratio':>9}")
        for label, factory in kernel_cases(n, amps):
            run_numba = factory(numba_mod)
            run_numba()
            t_numba = best_of(run_numba, args.repeats, args.inner)
            t_numpy = best_of(factory(numpy_mod), args.repeats, args.inner)
            print(fmt_row(label, t_numpy, t_numba))

        t_np, p_np = bench_probe(n, numpy_mod, args.repeats, np.random.default_rng(args.seed))
        t_nb, p_nb = bench_probe(n, numba_mod, args.repeats, np.random.default_rng(args.seed))
        gap = max(abs(a - b) for a, b in zip(p_np, p_nb))
        print(fmt_row("full readout probe", t_np, t_nb))
        print(f"  probe agreement across backends: max |dp| = {gap:.3e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
