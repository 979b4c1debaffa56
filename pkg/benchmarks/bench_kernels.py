"""Benchmark the compiled kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py [--grid N] [--repeats R]

Times each hot pointwise kernel on representative padded-grid shapes and one
full coupled step with either backend (the step timing includes FFTs, which
are backend-independent, so it bounds the end-to-end gain).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from magnetoelastic import kernels
from magnetoelastic.bases import VelocityBasis
from magnetoelastic.domain import Domain
from magnetoelastic.fields import (constant_unit_m, identity_tensor,
                                   random_divfree_velocity, unit_magnetization)
from magnetoelastic.integrators import MonolithicStepper, SimState
from magnetoelastic.operators import assemble_convection_tensor
from magnetoelastic.params import ExternalField, ModelParams

KERNELS = ("cross3", "advect", "odot", "ff_t", "gradv_f", "transport_f",
           "llg_cross_rhs", "llg_expanded_nonstiff")


def kernel_args(name: str, N: int, rng):
    v = rng.standard_normal((2, N, N))
    gM = rng.standard_normal((3, 2, N, N))
    M = rng.standard_normal((3, N, N))
    H = rng.standard_normal((3, N, N))
    L = rng.standard_normal((3, N, N))
    F = rng.standard_normal((4, N, N))
    gF = rng.standard_normal((4, 2, N, N))
    gv = rng.standard_normal((2, 2, N, N))
    return {
        "cross3": (M, H),
        "advect": (v, gM),
        "odot": (gM,),
        "ff_t": (F, 0.02),
        "gradv_f": (gv, F),
        "transport_f": (v, gF, gv, F),
        "llg_cross_rhs": (v, gM, M, H, 1.0, 1.0),
        "llg_expanded_nonstiff": (v, gM, M, L, H),
    }[name]


def time_call(fn, args, repeats: int) -> float:
    fn(*args)  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - t0) / repeats


def bench_kernels(N: int, repeats: int) -> None:
    rng = np.random.default_rng(0)
    print(f"pointwise kernels on a {N}x{N} grid ({repeats} repeats)")
    print(f"{'kernel':24s} {'numpy [us]':>12s} {'compiled [us]':>14s} {'speedup':>8s}")
    for name in KERNELS:
        args = kernel_args(name, N, rng)
        t_np = time_call(kernels.numpy_impl(name), args, repeats)
        compiled = kernels.compiled_impl(name)
        if compiled is None:
            print(f"{name:24s} {t_np * 1e6:12.1f} {'n/a':>14s} {'-':>8s}")
            continue
        t_cy = time_call(compiled, args, repeats)
        print(f"{name:24s} {t_np * 1e6:12.1f} {t_cy * 1e6:14.1f} {t_np / t_cy:8.2f}")


def bench_step(n: int, repeats: int) -> None:
    domain = Domain(n)
    basis = VelocityBasis(domain, 16)
    tensors = assemble_convection_tensor(basis)
    params = ModelParams()
    hext = ExternalField("zero")
    g0 = basis.project(random_divfree_velocity(domain, band=2, amplitude=0.1, seed=1))
    state = SimState(0.0, g0, identity_tensor(domain).coeffs,
                     unit_magnetization(domain, band=2, amplitude=0.2, seed=2).coeffs,
                     domain, basis)
    stepper = MonolithicStepper(tensors, params, hext)
    stepper.step(state, 1e-3)
    t0 = time.perf_counter()
    s = state
    for _ in range(repeats):
        s = stepper.step(s, 1e-3)
    per = (time.perf_counter() - t0) / repeats
    print(f"coupled step on n={n} ({kernels.BACKEND} backend): {per * 1e3:.2f} ms/step")


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, default=64, help="padded grid size for kernel timings")
    ap.add_argument("--repeats", type=int, default=200)
    ap.add_argument("--step-n", type=int, default=32)
    ap.add_argument("--step-repeats", type=int, default=50)
    args = ap.parse_args()
    print(f"active backend: {kernels.BACKEND}")
    bench_kernels(args.grid, args.repeats)
    bench_step(args.step_n, args.step_repeats)


if __name__ == "__main__":
    main()
