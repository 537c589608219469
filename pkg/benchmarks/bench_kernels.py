"""Compare the compiled statevector kernels against the numpy fallback.

Micro-benchmarks each kernel entry point on a realistic batch, checks the
two implementations agree bitwise-closely, then times one full noisy
trajectory simulation per backend.  Run from the repo root:

    python3 benchmarks/bench_kernels.py [--batch 4096] [--width 6]
"""

from __future__ import annotations

import argparse
import contextlib
import time

import numpy as np

from qvforge.device import load_device
from qvforge.qvgen import QvSpec, generate_qv_circuit, haar_su4
from qvforge.router import RoutingConfig, apply_layout, build_bip, solve_bip
from qvforge.scheduler import default_dd_policy, insert_dd, schedule_asap
from qvforge.simkit import from_device, simulate_noisy, statevec as sv

KERNELS = ("apply_1q", "apply_2q", "apply_phase", "apply_detuning", "population")


def has_compiled() -> bool:
    try:
        from qvforge._kernels import _statevec  # noqa: F401

        return True
    except ImportError:
        return False


@contextlib.contextmanager
def backend(name: str):
    """Temporarily rebind the statevec entry points to one implementation."""
    saved = {k: getattr(sv, k) for k in KERNELS}
    if name == "python":
        for k in KERNELS:
            setattr(sv, k, getattr(sv, f"{k}_py"))
    else:
        from qvforge._kernels import _statevec as ext

        for k in KERNELS:
            setattr(sv, k, getattr(ext, k))
    try:
        yield
    finally:
        for k, fn in saved.items():
            setattr(sv, k, fn)


def bench(fn, *args, reps: int, warmup: int = 3) -> float:
    for _ in range(warmup):
        fn(*args)
    t0 = time.perf_counter()
    for _ in range(reps):
        fn(*args)
    return (time.perf_counter() - t0) / reps


def fresh_states(gen, batch, m):
    s = gen.normal(size=(batch, 1 << m)) + 1j * gen.normal(size=(batch, 1 << m))
    s /= np.linalg.norm(s, axis=1, keepdims=True)
    return np.ascontiguousarray(s, dtype=np.complex128)


def micro(batch: int, m: int, reps: int) -> None:
    gen = np.random.default_rng(0)
    u2 = haar_su4(gen)[:2, :2]
    u2 /= np.sqrt(abs(np.linalg.det(u2)))
    u4 = haar_su4(gen)
    angles = gen.normal(size=batch)
    cases = [
        ("apply_1q", lambda f, s: f(s, m, m // 2, u2)),
        ("apply_2q", lambda f, s: f(s, m, 1, m - 2, u4)),
        ("apply_phase", lambda f, s: f(s, m, m // 2, 0.37)),
        ("apply_detuning", lambda f, s: f(s, m, m // 2, angles)),
        ("population", lambda f, s: f(s, m, m // 2)),
    ]
    print(f"\nkernel micro-benchmarks  (batch={batch}, m={m}, {reps} reps)")
    print(f"{'kernel':<16}{'python':>12}{'compiled':>12}{'speedup':>10}{'max|diff|':>12}")
    for name, call in cases:
        py = getattr(sv, f"{name}_py")
        from qvforge._kernels import _statevec as ext

        cy = getattr(ext, name)
        base = fresh_states(gen, batch, m)
        out_py = np.asarray(call(py, base.copy()))
        out_cy = np.asarray(call(cy, base.copy()))
        diff = float(np.max(np.abs(out_py - out_cy)))
        t_py = bench(lambda: call(py, base.copy()), reps=reps)
        t_cy = bench(lambda: call(cy, base.copy()), reps=reps)
        print(
            f"{name:<16}{t_py * 1e6:>10.1f}us{t_cy * 1e6:>10.1f}us"
            f"{t_py / t_cy:>9.1f}x{diff:>12.2e}"
        )


def end_to_end(m: int, shots: int) -> None:
    device = load_device("montreal_chain")
    noise = from_device(device)
    circuit = generate_qv_circuit(QvSpec(m=m, d=m, seed=3), 0)
    cfg = RoutingConfig()
    sol = solve_bip(build_bip(circuit, device, cfg))
    s = insert_dd(schedule_asap(apply_layout(circuit, sol, device, cfg), device),
                  default_dd_policy(device))
    print(f"\nfull trajectory simulation  (m={m}, {shots} shots)")
    times = {}
    for name in ("python", "compiled"):
        with backend(name):
            t0 = time.perf_counter()
            counts = simulate_noisy(s, noise, shots, seed=5)
            times[name] = time.perf_counter() - t0
        print(f"  {name:<10}{times[name]:>8.2f} s   ({counts.shots} shots)")
    print(f"  speedup   {times['python'] / times['compiled']:>7.1f}x")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--batch", type=int, default=4096)
    ap.add_argument("--width", type=int, default=6)
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--shots", type=int, default=20000)
    args = ap.parse_args()
    if not has_compiled():
        raise SystemExit(
            "compiled kernels are not built; install the package first "
            "(pip install -e . --no-build-isolation)"
        )
    print(f"active backend: {sv.backend_name()}")
    micro(args.batch, args.width, args.reps)
    end_to_end(args.width, args.shots)


if __name__ == "__main__":
    main()
