"""Compiled and pure-numpy backends produce the same numbers."""

import json
import os
import subprocess
import sys

import numpy as np

SCRIPT = r"""
import json
import numpy as np
from cvlab._backend import backend_name
from cvlab.dynamics import OUKernel, SystemParams, build_model
from cvlab.fock import (FockConfig, fock_evolve, fock_negativity, fock_prepare,
                        partial_trace_last, pseudomode_generator)
from cvlab.gaussian import SqueezeSpec, log_negativity_batch, prepare_squeezed_coherent
from cvlab.integrator import IntegratorConfig, integrate

model = build_model("o0", SystemParams(delta_AB=-0.7, delta_AE=0.4), OUKernel(0.8))
y0 = model.initial_vector(prepare_squeezed_coherent(SqueezeSpec(0.6, -0.4)))
traj = integrate(model, y0, IntegratorConfig(horizon=10.0, sample_dt=0.5))
R, sigma = traj.quadrature()
rho = fock_prepare(SqueezeSpec(0.2, -0.1, 0.3, 0j), FockConfig(cutoff_per_mode=8), pseudomode_n_bar=0.0)
run = fock_evolve(rho, pseudomode_generator(1.0, -0.5, 1.0, 1.5), horizon=0.5, dt=0.02,
                  sample_every=5, leakage_tol=1e-2)
print(json.dumps({
    "backend": backend_name(),
    "E_N": log_negativity_batch(sigma).tolist(),
    "fock": [fock_negativity(partial_trace_last(s)) for s in run.states],
}))
"""


def _run(disable):
    env = dict(os.environ)
    env.pop("CVLAB_DISABLE_NUMBA", None)
    if disable:
        env["CVLAB_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True,
                         text=True, check=True).stdout
    return json.loads(out.strip().splitlines()[-1])


def test_backends_agree():
    fast, plain = _run(False), _run(True)
    assert fast["backend"] == "numba" and plain["backend"] == "numpy"
    np.testing.assert_allclose(fast["E_N"], plain["E_N"], atol=1e-10)
    np.testing.assert_allclose(fast["fock"], plain["fock"], atol=1e-12)
