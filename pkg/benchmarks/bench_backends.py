"""Compare the numba kernels with the plain numpy fallback.

Each backend runs in its own interpreter because the choice is fixed at
import time by ``CVLAB_DISABLE_NUMBA``.  Two workloads are timed:

* ``moments``: one O₀ moment trajectory over the default horizon and grid
  (the unit of work of every scan experiment).
* ``fock``: repeated application of the pseudomode master-equation
  superoperator at oracle-sized cutoffs (the inner loop of the oracle).

The first call of each workload is timed separately as ``warmup`` (it
includes numba compilation or loading from the on-disk cache).

Usage::

    python3 benchmarks/bench_backends.py [--repeat 3] [--fock-calls 20] [--json out.json]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from cvlab._backend import backend_name
from cvlab.dynamics import OUKernel, SystemParams, build_model
from cvlab.fock import FockConfig, fock_prepare, pseudomode_generator
from cvlab.gaussian import SqueezeSpec, prepare_squeezed_coherent
from cvlab.integrator import IntegratorConfig, integrate

repeat, fock_calls = int(sys.argv[1]), int(sys.argv[2])

model = build_model("o0", SystemParams(delta_AB=-0.06, delta_AE=10.0), OUKernel(0.5))
y0 = model.initial_vector(prepare_squeezed_coherent(SqueezeSpec(1.0, -1.0)))
cfg = IntegratorConfig()

rho = fock_prepare(SqueezeSpec(0.4, -0.3, 0.5, 0.5j), FockConfig(), pseudomode_n_bar=0.1)
apply = pseudomode_generator(1.0, -0.5, 1.0, 1.5, n_bar=0.1).superoperator(rho.dims)
mat = rho.matrix().copy()


def moments():
    integrate(model, y0, cfg)


def fock():
    for _ in range(fock_calls):
        apply(mat)


out = {"backend": backend_name(), "fock_dims": list(rho.dims)}
for name, fn in (("moments", moments), ("fock", fock)):
    t0 = time.perf_counter()
    fn()
    out[name + "_warmup"] = time.perf_counter() - t0
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    out[name] = min(times)
print(json.dumps(out))
"""


def run_backend(disable: bool, repeat: int, fock_calls: int) -> dict:
    env = dict(os.environ)
    env.pop("CVLAB_DISABLE_NUMBA", None)
    if disable:
        env["CVLAB_DISABLE_NUMBA"] = "1"
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, str(repeat), str(fock_calls)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3, help="timed repetitions (best is kept)")
    p.add_argument("--fock-calls", type=int, default=20, help="superoperator applications per run")
    p.add_argument("--json", help="also write the raw numbers to this file")
    args = p.parse_args(argv)

    fast = run_backend(False, args.repeat, args.fock_calls)
    plain = run_backend(True, args.repeat, args.fock_calls)
    dims = "x".join(map(str, fast["fock_dims"]))
    print(f"{'workload':<28}{'numba [s]':>12}{'numpy [s]':>12}{'speed-up':>10}")
    for key, label in (("moments", "O0 trajectory (t=150)"),
                       ("fock", f"Fock rhs x{args.fock_calls} ({dims})")):
        print(f"{label:<28}{fast[key]:>12.3f}{plain[key]:>12.3f}{plain[key] / fast[key]:>10.1f}")
        print(f"{'  first call':<28}{fast[key + '_warmup']:>12.3f}{plain[key + '_warmup']:>12.3f}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"numba": fast, "numpy": plain}, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
