"""Compare the numba and numpy backends.

Two measurements:

* kernel: ``rk4_steps`` called directly on a caption-parameter problem, both
  implementations in one process (numba compile time excluded);
* end to end: one ``evolve`` call in a fresh interpreter per backend, with
  the backend chosen through ``MAJORANA_QD_DISABLE_NUMBA``.

Usage: ``python3 benchmarks/bench_kernels.py [--steps N] [--horizon T]``
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from majorana_qd import BathParams, ModelParams, build_hamiltonian, diagonalize
from majorana_qd import _kernels
from majorana_qd.bath import MINUS, PLUS, correlation
from majorana_qd.propagator import jump_matrices

END_TO_END = """
import json, sys, time
from majorana_qd import BathParams, ModelParams, backend, evolve, preset_initial_state
p = ModelParams.majorana(0.5, 0.5, 0.1, 0.2)
b = BathParams(0.05, 1.0, 50.0, 1.0)
rho0 = preset_initial_state("w")
evolve(rho0, p, b, 0.1, 0.005)  # warm-up (numba compile or cache load)
start = time.perf_counter()
evolve(rho0, p, b, float(sys.argv[1]), 0.005, sample_every=10)
print(json.dumps({"backend": backend(), "seconds": time.perf_counter() - start}))
"""


def kernel_problem(nsteps, panels=1):
    sp = diagonalize(build_hamiltonian(ModelParams.majorana(0.5, 0.5, 0.1, 0.2)))
    b = BathParams(0.05, 1.0, 50.0, 1.0)
    jm = jump_matrices(sp)
    step = 0.005
    du = step / (4 * panels)
    u = du * np.arange(4 * panels * nsteps + 1)
    rho = np.zeros((8, 8), dtype=complex)
    rho[0, 0] = 1.0
    return dict(
        rho=rho,
        omega=np.ascontiguousarray(sp.bohr_frequencies()),
        d=np.ascontiguousarray(jm.d_dag_eig),
        dh=np.ascontiguousarray(jm.d_eig),
        ap=np.ascontiguousarray(correlation(PLUS, u, b)),
        am=np.ascontiguousarray(correlation(MINUS, u, b)),
        du=du,
        m=panels,
        nsteps=nsteps,
    )


def time_kernel(fn, prob, repeat):
    def call():
        rho = prob["rho"].copy()
        gp = np.zeros((8, 8), dtype=complex)
        gm = np.zeros((8, 8), dtype=complex)
        fn(rho, gp, gm, prob["omega"], prob["d"], prob["dh"], prob["ap"], prob["am"],
           0, prob["nsteps"], prob["du"], prob["m"])
        return rho

    call()
    return min(timeit.repeat(call, number=1, repeat=repeat)), call()


def end_to_end(horizon, disable):
    env = dict(os.environ)
    env.pop("MAJORANA_QD_DISABLE_NUMBA", None)
    if disable:
        env["MAJORANA_QD_DISABLE_NUMBA"] = "1"
    out = subprocess.run(
        [sys.executable, "-c", END_TO_END, str(horizon)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=2000, help="RK4 steps for the kernel timing")
    ap.add_argument("--horizon", type=float, default=20.0, help="evolve horizon for the end-to-end timing")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if not _kernels.HAVE_NUMBA:
        print("numba unavailable or disabled; kernel comparison skipped")
    else:
        prob = kernel_problem(args.steps)
        t_nb, r_nb = time_kernel(_kernels.rk4_steps_loops, prob, args.repeat)
        t_np, r_np = time_kernel(_kernels.rk4_steps_numpy, prob, args.repeat)
        print(f"rk4_steps, {args.steps} steps (best of {args.repeat})")
        print(f"  numba  {t_nb * 1e3:9.2f} ms  {t_nb / args.steps * 1e6:7.2f} us/step")
        print(f"  numpy  {t_np * 1e3:9.2f} ms  {t_np / args.steps * 1e6:7.2f} us/step")
        print(f"  speedup {t_np / t_nb:.1f}x, max |difference| {np.abs(r_nb - r_np).max():.1e}")

    print(f"evolve to t={args.horizon:g} at h=0.005, fresh process per backend")
    runs = [end_to_end(args.horizon, disable) for disable in (False, True)]
    for r in runs:
        print(f"  {r['backend']:6s} {r['seconds']:8.3f} s")
    if runs[0]["backend"] != runs[1]["backend"]:
        print(f"  speedup {runs[1]['seconds'] / runs[0]['seconds']:.1f}x")


if __name__ == "__main__":
    main()
