"""Truncated Fock-space oracle for the Markov and pseudomode generators.

The density operator of ``n`` modes with cutoffs ``(d_1, ..., d_n)`` is held
as a tensor of shape ``(d_1, ..., d_n, d_1, ..., d_n)``: row indices first,
column indices second.  Ladder operators are sparse Kronecker products and
the GKLS right-hand side is a fused compiled kernel over them.

Truncation bookkeeping.  Truncated GKLS evolution is exactly trace
preserving, so ``1 - Tr ρ`` is not informative.  Leakage is instead defined
as the population the initial state loses to truncation plus the largest
population ever seen on a cutoff boundary (``n_k = d_k - 1`` for any mode).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from ._backend import USE_NUMBA, jit
from .errors import InvalidArgument, LeakageBreach, TruncationRisk
from .gaussian import SqueezeSpec

BIG_CUTOFF = 80
MAX_AUTO_CUTOFF = 40
# RK4 step times the generator norm bound; generator eigenvalues stay within |λ dt| <= 2
RK4_SAFETY = 1.0
# automatic cutoffs grow by this many levels per retry after a leakage breach
CUTOFF_GROWTH = 2
MAX_CUTOFF_RETRIES = 3


@dataclass(frozen=True)
class FockConfig:
    """Truncation settings.

    Attributes:
        cutoff_per_mode: fixed cutoff for every mode; ``None`` sizes each
            mode from its exact photon distribution, never below
            :func:`default_cutoff`.
        pseudomode_cutoff: cutoff for the auxiliary mode, overriding
            ``cutoff_per_mode``; ``None`` sizes it from the thermal tail.
        squeeze_cap: largest accepted ``|s|``.
        displacement_cap: largest accepted ``|α|``.
        leakage_tol: leakage budget; the comparison is void above it.
        max_entries: ceiling on the number of density-matrix entries.
    """

    cutoff_per_mode: int | None = None
    pseudomode_cutoff: int | None = None
    squeeze_cap: float = 0.4
    displacement_cap: float = 1.0
    leakage_tol: float = 1e-6
    max_entries: int = 4_000_000


@dataclass
class DensityOperator:
    """Density tensor with its per-mode cutoffs and truncation loss."""

    data: np.ndarray
    dims: tuple
    truncation_loss: float = 0.0

    @property
    def n_modes(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return int(np.prod(self.dims))

    def matrix(self) -> np.ndarray:
        return self.data.reshape(self.size, self.size)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix()))

    def check(self, herm_tol=1e-10, trace_tol=1e-6, psd_tol=-1e-8) -> dict:
        """Hermiticity, trace and positivity diagnostics."""
        m = self.matrix()
        herm = float(np.max(np.abs(m - m.conj().T)))
        ev = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
        tr = self.trace().real
        return {
            "hermitian": herm <= herm_tol,
            "trace_ok": abs(tr - 1.0) <= trace_tol,
            "psd": float(ev[0]) >= psd_tol,
            "asymmetry": herm,
            "trace": tr,
            "min_eig": float(ev[0]),
        }


# ---------------------------------------------------------------------------
# single-mode states


def _ladder(d: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, d)), 1)


def single_mode_vector(s: float, mu: complex, d: int = BIG_CUTOFF) -> np.ndarray:
    """``D(mu) S(s)|0⟩`` in a ``d``-level space, ``S(s) = exp(s(a² - a†²)/2)``."""
    a = _ladder(d)
    ad = a.T
    S = expm(0.5 * s * (a @ a - ad @ ad))
    D = expm(mu * ad - np.conj(mu) * a)
    vac = np.zeros(d, dtype=complex)
    vac[0] = 1.0
    return D @ (S @ vac)


def tail_mass(psi: np.ndarray, cut: int) -> float:
    return float(np.sum(np.abs(psi[cut:]) ** 2))


def auto_cutoff(psi: np.ndarray, tol: float, minimum: int = 4) -> int:
    """Smallest cutoff whose discarded population is below ``tol``."""
    p = np.abs(psi) ** 2
    tails = np.cumsum(p[::-1])[::-1]  # tails[k] = mass at n >= k
    for k in range(minimum, MAX_AUTO_CUTOFF + 1):
        if tails[k] <= tol:
            return k
    raise TruncationRisk(f"state needs more than {MAX_AUTO_CUTOFF} levels")


def thermal_populations(n_bar: float, d: int) -> np.ndarray:
    if n_bar == 0:
        p = np.zeros(d)
        p[0] = 1.0
        return p
    q = n_bar / (1.0 + n_bar)
    return (1.0 - q) * q ** np.arange(d)


def default_cutoff(n_modes: int) -> int:
    """Smallest cutoff used per mode: 10 for two modes, 6 for three."""
    return 10 if n_modes == 2 else 6


def _product(tensors) -> np.ndarray:
    out = tensors[0]
    for t in tensors[1:]:
        out = np.multiply.outer(out, t)
    return out


def fock_prepare(spec: SqueezeSpec, cfg: FockConfig | None = None,
                 pseudomode_n_bar: float | None = None, tol_share: float = 0.1,
                 extra_levels: int = 0) -> DensityOperator:
    """Normalized product input ``D(α)S(s_a) ⊗ D(β)S(s_b)`` (optionally ⊗ thermal pseudomode).

    Automatic cutoffs keep the discarded population and the population of
    the highest retained level of every mode below ``tol_share·leakage_tol``;
    ``extra_levels`` is added to every automatically sized cutoff.

    Raises:
        TruncationRisk: squeezing or displacement above the caps, or a state
            that does not fit into ``max_entries``.
    """
    cfg = cfg or FockConfig()
    for s in (spec.s_a, spec.s_b):
        if abs(s) > cfg.squeeze_cap + 1e-12:
            raise TruncationRisk(f"|s|={abs(s):g} exceeds the cap {cfg.squeeze_cap:g}")
    for mu in (spec.alpha, spec.beta):
        if abs(mu) > cfg.displacement_cap + 1e-12:
            raise TruncationRisk(f"|alpha|={abs(mu):g} exceeds the cap {cfg.displacement_cap:g}")
    n_modes = 2 if pseudomode_n_bar is None else 3
    floor = default_cutoff(n_modes)
    budget = cfg.leakage_tol * tol_share
    rhos, dims, loss = [], [], 0.0
    for s, mu in ((spec.s_a, spec.alpha), (spec.s_b, spec.beta)):
        psi = single_mode_vector(s, complex(mu))
        d = cfg.cutoff_per_mode or max(floor, auto_cutoff(psi, budget) + 1) + extra_levels
        loss += tail_mass(psi, d)
        v = psi[:d] / np.linalg.norm(psi[:d])
        rhos.append(np.outer(v, v.conj()))
        dims.append(d)
    if pseudomode_n_bar is not None:
        d = cfg.pseudomode_cutoff or cfg.cutoff_per_mode
        if d is None:
            d = floor
            while thermal_populations(pseudomode_n_bar, d)[-1] > budget:
                d += 1
            d += extra_levels
        pc = thermal_populations(pseudomode_n_bar, d)
        loss += 1.0 - pc.sum()
        rhos.append(np.diag(pc / pc.sum()).astype(complex))
        dims.append(d)
    size = int(np.prod(dims)) ** 2
    if size > cfg.max_entries:
        raise TruncationRisk(f"density matrix with cutoffs {tuple(dims)} needs {size} entries")
    full = _product(rhos)  # axes (r1, c1, r2, c2, ...)
    order = [2 * k for k in range(n_modes)] + [2 * k + 1 for k in range(n_modes)]
    data = np.ascontiguousarray(full.transpose(order))
    return DensityOperator(data, tuple(dims), float(loss))


# ---------------------------------------------------------------------------
# operators on the truncated tensor-product space


def ladder_operators(dims) -> list:
    """Sparse annihilation operators ``a_k`` on the product space."""
    ops = []
    for k, d in enumerate(dims):
        factors = [sp.identity(dk, format="csr", dtype=complex) for dk in dims]
        factors[k] = sp.csr_matrix(_ladder(d).astype(complex))
        op = factors[0]
        for f in factors[1:]:
            op = sp.kron(op, f, format="csr")
        ops.append(op)
    return ops


@dataclass(frozen=True)
class FockGenerator:
    """Quadratic number-conserving Hamiltonian plus linear jump operators.

    ``H = Σ h_ij a_i† a_j``; each jump is ``(coeffs, raising)`` meaning
    ``L = Σ_k coeffs[k] a_k`` (or ``a_k†`` when ``raising``).
    """

    h: np.ndarray
    jumps: tuple

    def assemble(self, dims):
        """Sparse ``A = -iH - ½Σ L†L`` and the jump list on ``dims``."""
        a = ladder_operators(dims)
        n = len(dims)
        D = int(np.prod(dims))
        H = sp.csr_matrix((D, D), dtype=complex)
        for i in range(n):
            for j in range(n):
                if self.h[i, j] != 0:
                    H = H + self.h[i, j] * (a[i].getH() @ a[j])
        Ls = []
        for coeffs, raising in self.jumps:
            L = sp.csr_matrix((D, D), dtype=complex)
            for k, c in enumerate(coeffs):
                if c != 0:
                    L = L + c * (a[k].getH() if raising else a[k])
            Ls.append(L.tocsr())
        A = -1j * H
        for L in Ls:
            A = A - 0.5 * (L.getH() @ L)
        return A.tocsr(), Ls

    def step_limit(self, dims, safety: float = RK4_SAFETY) -> float:
        """Largest RK4 step ``safety / ‖A‖_∞`` that keeps the fastest coherences resolved.

        ``‖A‖_∞`` bounds every eigenvalue of ``A`` (Gershgorin), and the
        generator eigenvalues are sums ``λ_i + λ_j*`` of them.
        """
        A, _ = self.assemble(dims)
        norm = float(np.max(np.asarray(abs(A).sum(axis=1)).ravel()))
        return safety / norm if norm > 0 else np.inf

    def superoperator(self, dims):
        """Right-hand side ``ρ ↦ Aρ + ρA† + Σ LρL†`` for Hermitian matrices ``ρ``."""
        A, Ls = self.assemble(dims)
        if USE_NUMBA:
            L = sp.vstack(Ls).tocsr()
            n_j = len(Ls)

            scratch = np.empty((A.shape[0], A.shape[0]), dtype=complex)

            def rhs(rho):
                out = np.empty_like(rho)
                _gkls_hermitian(A.indptr, A.indices, A.data, L.indptr, L.indices, L.data,
                                n_j, rho, scratch, out)
                return out

            return rhs

        def rhs(rho):
            X = A @ rho
            out = X + X.conj().T
            for L in Ls:
                # ρ Hermitian: ρL† = (Lρ)†
                out += L @ (L @ rho).conj().T
            return out

        return rhs


@jit
def _gkls_hermitian(Ap, Ai, Ad, Lp, Li, Ld, n_j, rho, X, out):
    """Fused ``Aρ + (Aρ)† + Σ (Lρ)L†`` for Hermitian ``ρ``.

    ``A`` and the stacked jumps are CSR arrays; jump ``q`` occupies rows
    ``q·D .. (q+1)·D - 1`` of the stacked matrix.  ``X`` is scratch space.
    Only the upper triangle is accumulated; the lower one is mirrored.
    """
    D = rho.shape[0]
    for i in range(D):
        for j in range(D):
            X[i, j] = 0.0
        for p in range(Ap[i], Ap[i + 1]):
            a = Ad[p]
            k = Ai[p]
            for j in range(D):
                X[i, j] += a * rho[k, j]
    for i in range(D):
        for j in range(i, D):
            out[i, j] = X[i, j] + np.conj(X[j, i])
    for q in range(n_j):
        for i in range(D):
            r0 = q * D + i
            for j in range(D):
                X[i, j] = 0.0
            for p in range(Lp[r0], Lp[r0 + 1]):
                a = Ld[p]
                k = Li[p]
                for j in range(D):
                    X[i, j] += a * rho[k, j]
        for i in range(D):
            for j in range(i, D):
                s = 0.0j
                r1 = q * D + j
                for p in range(Lp[r1], Lp[r1 + 1]):
                    s += X[i, Li[p]] * np.conj(Ld[p])
                out[i, j] += s
    for i in range(D):
        for j in range(i):
            out[i, j] = np.conj(out[j, i])


def markov_generator(kappa: float, delta_AB: float, n_bar: float = 0.0) -> FockGenerator:
    h = np.diag([0.0, delta_AB]).astype(complex)
    jumps = [((np.sqrt(kappa * (n_bar + 1)),) * 2, False)]
    if n_bar > 0:
        jumps.append(((np.sqrt(kappa * n_bar),) * 2, True))
    return FockGenerator(h, tuple(jumps))


def pseudomode_generator(kappa: float, delta_AB: float, delta_AE: float,
                         gamma: float, n_bar: float = 0.0) -> FockGenerator:
    g = np.sqrt(0.5 * gamma) * np.sqrt(kappa)
    h = np.array(
        [[0.0, 0.0, g], [0.0, delta_AB, g], [g, g, delta_AE]], dtype=complex
    )
    jumps = [((0.0, 0.0, np.sqrt(2 * gamma * (n_bar + 1))), False)]
    if n_bar > 0:
        jumps.append(((0.0, 0.0, np.sqrt(2 * gamma * n_bar)), True))
    return FockGenerator(h, tuple(jumps))


# ---------------------------------------------------------------------------
# observables


def partial_trace_last(rho: DensityOperator) -> DensityOperator:
    """Trace out the last mode."""
    n = rho.n_modes
    x = np.trace(rho.data, axis1=n - 1, axis2=2 * n - 1)
    return DensityOperator(x, rho.dims[:-1], rho.truncation_loss)


def fock_negativity(rho: DensityOperator, partition: int = 0) -> float:
    """``ln ‖ρ^{T_A}‖₁`` with the partial transpose on mode ``partition`` (two modes)."""
    if rho.n_modes != 2:
        raise InvalidArgument("fock_negativity expects a two-mode operator")
    x = rho.data
    if partition == 0:
        pt = x.transpose(2, 1, 0, 3)
    elif partition == 1:
        pt = x.transpose(0, 3, 2, 1)
    else:
        raise InvalidArgument("partition must be 0 or 1")
    m = pt.reshape(rho.size, rho.size)
    ev = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    return float(max(0.0, np.log(np.sum(np.abs(ev)))))


def expectation(rho: DensityOperator, ops) -> complex:
    """``Tr[o_1 o_2 ... ρ]`` for ops given as ``(mode, dagger)`` pairs, rightmost applied first."""
    a = ladder_operators(rho.dims)
    x = rho.matrix()
    for mode, dag in reversed(list(ops)):
        x = (a[mode].getH() if dag else a[mode]) @ x
    return complex(np.trace(x))


def ladder_moments(rho: DensityOperator):
    """``(m, M, N)`` of all modes from the density matrix."""
    a = ladder_operators(rho.dims)
    x = rho.matrix()
    n = rho.n_modes
    ax = [op @ x for op in a]
    tr = lambda y: complex(np.trace(y))  # noqa: E731
    m = np.array([tr(y) for y in ax])
    M = np.array([[tr(a[i] @ ax[j]) for j in range(n)] for i in range(n)])
    N = np.array([[tr(a[i].getH() @ ax[j]) for j in range(n)] for i in range(n)])
    return m, M, N


def boundary_population(rho: DensityOperator) -> float:
    """Total population sitting on the highest retained level of any mode."""
    diag = np.real(np.diagonal(rho.matrix())).reshape(rho.dims)
    total = 0.0
    for k, d in enumerate(rho.dims):
        idx = [slice(None)] * rho.n_modes
        idx[k] = d - 1
        total += float(np.sum(diag[tuple(idx)]))
    return total


def purity(rho: DensityOperator) -> float:
    m = rho.matrix()
    return float(np.real(np.vdot(m.conj().T, m)))


# ---------------------------------------------------------------------------
# evolution


@dataclass
class FockRun:
    """Sampled oracle evolution."""

    times: np.ndarray
    states: list
    leakage: float
    boundary: np.ndarray


def fock_evolve(rho0: DensityOperator, generator: FockGenerator, horizon: float,
                dt: float = 0.025, sample_every: int = 4,
                leakage_tol: float = 1e-6) -> FockRun:
    """Classical RK4 on the GKLS equation with leakage monitoring.

    Hermiticity and trace are monitored through the returned states and
    never projected back.

    Raises:
        LeakageBreach: leakage exceeded ``leakage_tol``; carries the time.
    """
    if dt <= 0 or horizon <= 0:
        raise InvalidArgument("dt and horizon must be positive")
    n_steps = int(round(horizon / dt))
    f = generator.superoperator(rho0.dims)
    rho = rho0.matrix().astype(complex, copy=True)
    shape = rho0.data.shape
    times, states, bnd = [], [], []

    def record(t, r):
        op = DensityOperator(r.reshape(shape).copy(), rho0.dims, rho0.truncation_loss)
        b = boundary_population(op)
        leak = rho0.truncation_loss + b
        if leak > leakage_tol:
            raise LeakageBreach(f"leakage {leak:.3g} at t={t:.4g}", t, leak)
        times.append(t)
        states.append(op)
        bnd.append(b)

    record(0.0, rho)
    for step in range(1, n_steps + 1):
        k = f(rho)
        acc = k.copy()
        k = f(rho + (0.5 * dt) * k)
        acc += 2.0 * k
        k = f(rho + (0.5 * dt) * k)
        acc += 2.0 * k
        k = f(rho + dt * k)
        acc += k
        rho += (dt / 6.0) * acc
        if step % sample_every == 0 or step == n_steps:
            record(step * dt, rho)
    bnd = np.array(bnd)
    return FockRun(np.array(times), states, float(rho0.truncation_loss + bnd.max()), bnd)


# ---------------------------------------------------------------------------
# fidelity


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fock_fidelity(rho1: DensityOperator, rho2: DensityOperator) -> float:
    """Uhlmann root fidelity ``Tr √(√ρ₁ ρ₂ √ρ₁)``; ``|⟨ψ₁|ψ₂⟩|`` for pure states."""
    if rho1.dims != rho2.dims:
        raise InvalidArgument("operators live on different truncated spaces")
    s1 = _psd_sqrt(rho1.matrix())
    inner = s1 @ rho2.matrix() @ s1
    w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))


# ---------------------------------------------------------------------------
# comparison against the Gaussian pipeline

ORACLE_EN_TOL = 2e-3
ORACLE_HORIZON = 4.0
ORACLE_DT = 0.05
ORACLE_SAMPLE_EVERY = 2
ORACLE_PSEUDOMODE_N_BAR = (0.0, 0.1)


@dataclass
class OracleComparison:
    """One oracle-versus-Gaussian run."""

    seed: int
    generator: str
    n_bar: float
    spec: SqueezeSpec
    params: dict
    dims: tuple
    times: np.ndarray
    en_fock: np.ndarray
    en_gauss: np.ndarray
    leakage: float
    error: str | None = None

    @property
    def max_abs_diff(self) -> float:
        if self.error is not None:
            return float("nan")
        return float(np.max(np.abs(self.en_fock - self.en_gauss)))

    @property
    def passed(self) -> bool:
        return self.error is None and self.max_abs_diff <= ORACLE_EN_TOL

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "generator": self.generator,
            "n_bar": self.n_bar,
            "s_a": self.spec.s_a,
            "s_b": self.spec.s_b,
            "alpha": [complex(self.spec.alpha).real, complex(self.spec.alpha).imag],
            "beta": [complex(self.spec.beta).real, complex(self.spec.beta).imag],
            **self.params,
            "cutoffs": list(self.dims),
            "max_abs_dEN": self.max_abs_diff,
            "max_EN": float(np.max(self.en_gauss)) if self.en_gauss.size else float("nan"),
            "leakage": self.leakage,
            "passed": self.passed,
            "error": self.error,
        }


def random_capped_input(rng: np.random.Generator, cfg: FockConfig | None = None) -> SqueezeSpec:
    """Uniform squeezing in ``[-cap, cap]`` and displacement in the disc of radius ``cap``."""
    cfg = cfg or FockConfig()
    s = rng.uniform(-cfg.squeeze_cap, cfg.squeeze_cap, size=2)
    r = cfg.displacement_cap * np.sqrt(rng.uniform(0.0, 1.0, size=2))
    phi = rng.uniform(0.0, 2 * np.pi, size=2)
    mu = r * np.exp(1j * phi)
    return SqueezeSpec(float(s[0]), float(s[1]), complex(mu[0]), complex(mu[1]))


def _oracle_step(generator: FockGenerator, dims, dt: float, sample_every: int) -> tuple:
    """RK4 step and substeps per sample so that ``dt·sample_every`` is unchanged."""
    interval = dt * sample_every
    k = max(sample_every, int(np.ceil(interval / min(dt, generator.step_limit(dims)) - 1e-9)))
    return interval / k, k


def compare_with_gaussian(spec: SqueezeSpec, generator: str, delta_AB: float,
                          delta_AE: float = 0.0, gamma: float = 1.0, n_bar: float = 0.0,
                          cfg: FockConfig | None = None, horizon: float = ORACLE_HORIZON,
                          dt: float = ORACLE_DT, sample_every: int = ORACLE_SAMPLE_EVERY,
                          seed: int = -1) -> OracleComparison:
    """Evolve ``spec`` in both pipelines and collect E_N(t) on a common grid (κ = 1).

    ``dt`` is an upper bound: the RK4 step shrinks to
    :meth:`FockGenerator.step_limit` when the truncated generator is stiffer,
    keeping the sampling interval ``dt·sample_every``.  Automatic cutoffs
    grow by ``CUTOFF_GROWTH`` after a leakage breach, at most
    ``MAX_CUTOFF_RETRIES`` times; a breach that survives the retries is
    recorded in ``error`` and makes the comparison fail.
    """
    from .dynamics import OUKernel, SystemParams, ThermalBath, build_model
    from .gaussian import log_negativity_batch, prepare_squeezed_coherent
    from .integrator import IntegratorConfig, integrate

    cfg = cfg or FockConfig()
    system = SystemParams(kappa=1.0, delta_AB=delta_AB, delta_AE=delta_AE)
    bath = ThermalBath(n_bar)
    if generator == "markov":
        gen = markov_generator(1.0, delta_AB, n_bar)
        model = build_model("markov", system, None, bath)
        params = {"delta_AB": delta_AB}
        pm_n_bar = None
    elif generator == "pseudomode":
        gen = pseudomode_generator(1.0, delta_AB, delta_AE, gamma, n_bar)
        model = build_model("pseudomode", system, OUKernel(gamma), bath)
        params = {"delta_AB": delta_AB, "delta_AE": delta_AE, "gamma": gamma}
        pm_n_bar = n_bar
    else:
        raise InvalidArgument(f"the oracle covers markov and pseudomode, not {generator!r}")
    icfg = IntegratorConfig(horizon=horizon, sample_dt=dt * sample_every)
    traj = integrate(model, model.initial_vector(prepare_squeezed_coherent(spec)), icfg)
    en_g = log_negativity_batch(traj.quadrature()[1])
    fixed = cfg.cutoff_per_mode is not None
    attempt = 0
    while True:
        rho0 = fock_prepare(spec, cfg, pseudomode_n_bar=pm_n_bar,
                            extra_levels=CUTOFF_GROWTH * attempt)
        step, k = _oracle_step(gen, rho0.dims, dt, sample_every)
        try:
            run = fock_evolve(rho0, gen, horizon, step, k, cfg.leakage_tol)
            break
        except LeakageBreach as exc:
            attempt += 1
            grown = [d + CUTOFF_GROWTH for d in rho0.dims]
            if fixed or attempt > MAX_CUTOFF_RETRIES or int(np.prod(grown)) ** 2 > cfg.max_entries:
                return OracleComparison(seed, generator, n_bar, spec, params, rho0.dims,
                                        traj.times, np.array([]), en_g, exc.leakage, str(exc))
    states = run.states if generator == "markov" else [partial_trace_last(s) for s in run.states]
    en_f = np.array([fock_negativity(s) for s in states])
    n = min(en_f.size, en_g.size)
    return OracleComparison(seed, generator, n_bar, spec, params, rho0.dims,
                            run.times[:n], en_f[:n], en_g[:n], run.leakage)


def oracle_seed(seed: int, cfg: FockConfig | None = None, horizon: float = ORACLE_HORIZON,
                dt: float = ORACLE_DT, generators=("markov", "pseudomode")) -> list:
    """Comparisons for one seed of the oracle suite.

    The seed draws one capped input and detunings.  The Markov run uses the
    input as drawn; the pseudomode run uses its centred copy (E_N does not
    depend on first moments) with ``n̄`` alternating over
    ``ORACLE_PSEUDOMODE_N_BAR``.
    """
    cfg = cfg or FockConfig()
    rng = np.random.default_rng(seed)
    spec = random_capped_input(rng, cfg)
    delta_AB = float(rng.uniform(-1.0, 0.5))
    delta_AE = float(rng.uniform(-2.0, 2.0))
    gamma = float(rng.uniform(0.5, 2.0))
    n_bar = ORACLE_PSEUDOMODE_N_BAR[seed % len(ORACLE_PSEUDOMODE_N_BAR)]
    out = []
    for gen in generators:
        if gen == "markov":
            out.append(compare_with_gaussian(spec, "markov", delta_AB, cfg=cfg, horizon=horizon,
                                             dt=dt, seed=seed))
        else:
            centred = SqueezeSpec(spec.s_a, spec.s_b, 0.0, 0.0)
            out.append(compare_with_gaussian(centred, "pseudomode", delta_AB, delta_AE, gamma,
                                             n_bar, cfg=cfg, horizon=horizon, dt=dt, seed=seed))
    return out


def oracle_check(n_seeds: int = 20, cutoff: int | None = None, horizon: float = ORACLE_HORIZON,
                 dt: float = ORACLE_DT, generators=("markov", "pseudomode"),
                 progress=None) -> list:
    """Run :func:`oracle_seed` for seeds ``0 .. n_seeds-1``."""
    cfg = FockConfig(cutoff_per_mode=cutoff)
    out = []
    for seed in range(n_seeds):
        for res in oracle_seed(seed, cfg, horizon, dt, generators):
            out.append(res)
            if progress is not None:
                progress(res)
    return out
