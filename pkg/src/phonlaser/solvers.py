"""Exact open-system solvers on the truncated Fock space.

Two complementary routes to the same master equation

    drho/dt = -i[H, rho] + sum_k rate_k (C_k rho C_k^dag - {C_k^dag C_k, rho}/2):

``steady_state`` assembles the sparse Liouvillian superoperator and solves
L(rho) = 0 directly through a trace-augmented LU factorization, while
``mcwf_ensemble`` unravels the dynamics into quantum-jump trajectories and
averages pure-state projectors.  The trajectory route pairs naturally with a
displaced-frame model, where fluctuations around the limit cycle fit in a
small Fock space.

Conventions: density matrices are vectorized by column stacking, so
vec(A X B) = (B^T kron A) vec(X) and the trace functional lives on the
entries arange(0, d*d, d+1).
"""

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import hilbert as hb
from . import observables as ob
from .model import LindbladModel, phonon_number_ops

DEFAULT_MAX_STEADY_DIM = 300
DEFAULT_MAX_MCWF_DIM = 1500
_MAX_SUBDIVISION_LEVEL = 16
_NORM_COLLAPSE = 1e-12


class SolverError(RuntimeError):
    """Raised when a solve cannot produce a trustworthy result."""


class TrajectoryError(SolverError):
    """Quantum-jump integration failure, tagged with its RNG provenance."""

    def __init__(self, message: str, seed: int, trajectory: int):
        super().__init__(f"{message} (seed={seed}, trajectory={trajectory})")
        self.seed = seed
        self.trajectory = trajectory


# -- Liouvillian assembly ----------------------------------------------------

def liouvillian(model: LindbladModel, max_dim: Optional[int] = None) -> sp.csr_matrix:
    """Sparse d^2 x d^2 superoperator generating the master equation.

    ``max_dim`` bounds the Hilbert-space dimension d; exceeding it raises
    SolverError before any memory is committed.
    """
    d = model.dims.dim
    if max_dim is not None and d > max_dim:
        raise SolverError(
            f"Hilbert dimension {d} exceeds the limit {max_dim} for superoperator "
            f"assembly; use a displaced-frame model, smaller Fock cutoffs, or raise "
            f"max_dim"
        )
    ident = sp.identity(d, dtype=complex, format="csr")
    H = model.hamiltonian.data
    L = -1j * (sp.kron(ident, H) - sp.kron(H.T, ident))
    for op, rate in model.collapse:
        if rate == 0.0:
            continue
        C = op.data
        CdC = (C.conj().T @ C).tocsr()
        L = L + rate * (
            sp.kron(C.conj(), C)
            - 0.5 * sp.kron(ident, CdC)
            - 0.5 * sp.kron(CdC.T, ident)
        )
    L = L.tocsr()

    # trace preservation: the trace functional annihilates every column
    trace_rows = np.arange(0, d * d, d + 1)
    col_sums = np.asarray(np.abs(L[trace_rows, :].sum(axis=0))).ravel()
    scale = max(1.0, np.abs(L.data).max()) if L.nnz else 1.0
    if col_sums.max() > 1e-10 * scale:
        raise SolverError(
            f"Liouvillian is not trace preserving (defect {col_sums.max():.3e}); "
            f"the model operators are inconsistent with the truncation"
        )
    return L


@dataclass(frozen=True)
class SteadyStateResult:
    """Stationary density matrix with its residual and factorization record."""

    state: hb.QuantumState
    residual: float
    diagnostics: dict = field(default_factory=dict)


def steady_state(
    model: LindbladModel,
    tol: float = 1e-10,
    max_dim: int = DEFAULT_MAX_STEADY_DIM,
) -> SteadyStateResult:
    """Solve L(rho) = 0 with Tr rho = 1 by direct sparse factorization.

    The singular system is made square by adding the trace functional,
    weighted to the Liouvillian's own scale, onto the first row; the unique
    null vector of L is then the unique solution of the augmented system.
    The reported residual is ||L vec(rho)||_1 / ||L||_1 and must come in
    under ``tol``.
    """
    d = model.dims.dim
    L = liouvillian(model, max_dim=max_dim).tocsc()
    n2 = d * d
    weight = np.abs(L.data).mean() if L.nnz else 1.0

    trace_cols = np.arange(0, n2, d + 1)
    augment = sp.csc_matrix(
        (np.full(d, weight), (np.zeros(d, dtype=int), trace_cols)), shape=(n2, n2)
    )
    rhs = np.zeros(n2, dtype=complex)
    rhs[0] = weight

    with warnings.catch_warnings():
        warnings.simplefilter("error", spla.MatrixRankWarning)
        try:
            lu = spla.splu((L + augment).tocsc(), permc_spec="COLAMD")
            x = lu.solve(rhs)
        except (RuntimeError, spla.MatrixRankWarning) as exc:
            raise SolverError(
                f"steady-state factorization failed ({exc}); the zero eigenvalue may "
                f"be degenerate at this truncation, try larger Fock cutoffs or a "
                f"small regularizing rate"
            ) from None

    rho = x.reshape((d, d), order="F")
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if not np.isfinite(tr) or abs(tr) < 1e-300:
        raise SolverError("steady-state solve returned a traceless solution")
    rho = rho / tr

    l_norm = np.asarray(np.abs(L).sum(axis=0)).max()
    residual = np.abs(L @ rho.reshape(-1, order="F")).sum() / l_norm
    if residual > tol:
        raise SolverError(
            f"steady-state residual {residual:.3e} exceeds tolerance {tol:.1e}; "
            f"try larger Fock cutoffs"
        )
    diagnostics = {
        "dim": d,
        "liouvillian_nnz": L.nnz,
        "lu_nnz": int(lu.nnz),
        "fill_factor": lu.nnz / max(L.nnz, 1),
        "trace_weight": float(weight),
    }
    return SteadyStateResult(
        state=hb.QuantumState(model.dims, rho), residual=float(residual),
        diagnostics=diagnostics,
    )


# -- quantum-jump trajectory ensemble ----------------------------------------

@dataclass(frozen=True)
class TrajectoryConfig:
    """Controls for the quantum-jump ensemble.

    The mechanical mode starts in a coherent state whose amplitude is drawn
    per trajectory from a complex normal law centered on ``initial_center``
    with total variance ``initial_spread`` (half per quadrature); both
    cavities start in vacuum.  All amplitudes are lab-frame quantities; for a
    displaced-frame model the frame offset is subtracted before building the
    state vector.  ``max_step`` caps the propagator step, ``max_jump_prob``
    triggers per-column step halving, and each trajectory owns an independent
    RNG stream spawned from (seed, trajectory index), which makes the
    ensemble bit-reproducible for a fixed configuration regardless of how
    trajectories are distributed over workers.
    """

    n_traj: int = 1000
    tau: Optional[float] = None  # default 5/gamma from the model parameters
    seed: int = 0
    initial_spread: float = 1.0
    initial_center: Optional[complex] = None
    max_step: Optional[float] = None
    max_jump_prob: float = 0.1
    bootstrap_samples: int = 200
    workers: int = 1
    keep_states: bool = False

    def __post_init__(self):
        if self.n_traj < 1:
            raise ValueError(f"n_traj {self.n_traj} < 1")
        if self.tau is not None and not self.tau > 0:
            raise ValueError(f"tau {self.tau} must be positive")
        if self.initial_spread < 0:
            raise ValueError(f"initial_spread {self.initial_spread} < 0")
        if self.max_step is not None and not self.max_step > 0:
            raise ValueError(f"max_step {self.max_step} must be positive")
        if not 0 < self.max_jump_prob < 1:
            raise ValueError(f"max_jump_prob {self.max_jump_prob} outside (0, 1)")
        if self.bootstrap_samples < 1:
            raise ValueError(f"bootstrap_samples {self.bootstrap_samples} < 1")
        if self.workers < 1:
            raise ValueError(f"workers {self.workers} < 1")


@dataclass(frozen=True)
class EnsembleResult:
    """Trajectory-averaged statistics at the final time."""

    stats: ob.PhononStats
    n_values: np.ndarray
    n2_values: np.ndarray
    observables: dict
    jump_counts: np.ndarray  # per trajectory
    diagnostics: dict
    final_states: Optional[np.ndarray] = None  # d x n_traj columns

    def density_matrix(self, dims: hb.ModeDims) -> hb.QuantumState:
        if self.final_states is None:
            raise ValueError("final states were not kept; rerun with keep_states=True")
        m = self.final_states.shape[1]
        rho = (self.final_states @ self.final_states.conj().T) / m
        return hb.QuantumState(dims, rho)


def _resolve_tau(model: LindbladModel, config: TrajectoryConfig) -> float:
    if config.tau is not None:
        return config.tau
    if model.params is not None and model.params.gamma > 0:
        return 5.0 / model.params.gamma
    raise ValueError("tau is required when the model carries no damping record")


def _resolve_center(model: LindbladModel, config: TrajectoryConfig) -> complex:
    if config.initial_center is not None:
        return complex(config.initial_center)
    if model.frame is not None:
        return complex(model.frame.zeta0)
    if model.params is not None:
        from .analytics import BelowThreshold, limit_cycle

        sol = limit_cycle(model.params)
        if not isinstance(sol, BelowThreshold):
            return complex(sol.zeta0)
    return 0.0


def _base_step(model: LindbladModel, tau: float, config: TrajectoryConfig) -> float:
    if config.max_step is not None:
        return min(config.max_step, tau)
    rates = [rate for _, rate in model.collapse if rate > 0]
    dt = tau / 400.0
    if rates:
        dt = min(dt, 0.2 / max(rates))
    return dt


class _JumpMachine:
    """Shared propagators and collapse data for one ensemble run."""

    def __init__(self, model: LindbladModel, dt: float, config: TrajectoryConfig):
        d = model.dims.dim
        h_eff = model.hamiltonian.to_dense().astype(complex)
        for op, rate in model.collapse:
            if rate > 0:
                cdc = (op.data.conj().T @ op.data).toarray()
                h_eff -= 0.5j * rate * cdc
        self._h_eff = h_eff
        self.dt = dt
        self.pmax = config.max_jump_prob
        self.channels = [(rate, op.data.tocsr()) for op, rate in model.collapse if rate > 0]
        self._propagators = {}

    def propagator(self, level: int) -> np.ndarray:
        if level not in self._propagators:
            step = self.dt / (2**level)
            self._propagators[level] = scipy.linalg.expm(-1j * step * self._h_eff)
        return self._propagators[level]

    def apply_jump(self, psi: np.ndarray, quantile: float, counts: np.ndarray) -> np.ndarray:
        weights = np.array(
            [rate * np.vdot(C @ psi, C @ psi).real for rate, C in self.channels]
        )
        total = weights.sum()
        if total <= 0:
            # jump flagged but no channel has weight; numerically dead branch
            return psi / np.sqrt(np.vdot(psi, psi).real)
        cum = np.cumsum(weights) / total
        k = min(int(np.searchsorted(cum, quantile, side="right")), len(self.channels) - 1)
        counts[k] += 1
        _, C = self.channels[k]
        phi = C @ psi
        return phi / np.sqrt(np.vdot(phi, phi).real)

    def step_column(
        self,
        psi: np.ndarray,
        gen: np.random.Generator,
        counts: np.ndarray,
        level: int,
        seed: int,
        traj: int,
    ) -> np.ndarray:
        """One step of size dt/2^level with recursive halving on large jump odds."""
        phi = self.propagator(level) @ psi
        norm2 = np.vdot(phi, phi).real
        p = 1.0 - norm2
        if p >= self.pmax and level < _MAX_SUBDIVISION_LEVEL:
            half = self.step_column(psi, gen, counts, level + 1, seed, traj)
            return self.step_column(half, gen, counts, level + 1, seed, traj)
        if norm2 < _NORM_COLLAPSE:
            raise TrajectoryError(
                f"wave-function norm collapsed at subdivision level {level}",
                seed, traj,
            )
        u = gen.random()
        if u < p:
            return self.apply_jump(psi, u / p, counts)
        return phi / np.sqrt(norm2)


def _initial_columns(
    model: LindbladModel,
    config: TrajectoryConfig,
    gens: list,
    center: complex,
) -> np.ndarray:
    dims = model.dims
    n_c = dims.n_c
    offset = model.frame.zeta0 if model.frame is not None else 0.0
    scale = np.sqrt(config.initial_spread / 2.0)
    cols = np.zeros((dims.dim, len(gens)), dtype=complex)
    tails = 0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", hb.TruncationWarning)
        for j, gen in enumerate(gens):
            re, im = gen.standard_normal(2)
            amp = center + scale * (re + 1j * im) - offset
            before = len(caught)
            # only flag draws that lose real weight; statistical noise dwarfs
            # per-mille truncation in any ensemble of practical size
            cols[:n_c, j] = hb._coherent_vector(
                n_c, amp, "mcwf initial state", tail_tol=1e-3
            )
            tails += len(caught) - before
    if tails:
        warnings.warn(
            f"{tails} of {len(gens)} initial coherent amplitudes lost weight to the "
            f"mechanical cutoff {n_c}; consider a larger cutoff",
            hb.TruncationWarning,
            stacklevel=2,
        )
    return cols


def _run_chunk(
    machine: _JumpMachine,
    psi: np.ndarray,
    gens: list,
    traj_offset: int,
    n_steps: int,
    seed: int,
) -> tuple:
    m = psi.shape[1]
    counts = np.zeros((m, len(machine.channels)), dtype=np.int64)
    subdivided = 0
    u_block = np.empty((m, n_steps))
    for j, gen in enumerate(gens):
        u_block[j] = gen.random(n_steps)
    u0 = machine.propagator(0)
    pmax = machine.pmax
    for s in range(n_steps):
        phi = u0 @ psi
        norm2 = np.einsum("ij,ij->j", phi.conj(), phi).real
        p = 1.0 - norm2
        u = u_block[:, s]
        calm = p < pmax
        jumped = calm & (u < p)
        smooth = calm & ~jumped
        psi[:, smooth] = phi[:, smooth] / np.sqrt(norm2[smooth])
        for j in np.nonzero(jumped)[0]:
            psi[:, j] = machine.apply_jump(psi[:, j], u[j] / p[j], counts[j])
        for j in np.nonzero(~calm)[0]:
            # the pre-drawn uniform for this step is discarded; the halved
            # sub-steps draw fresh ones from the trajectory's own stream
            subdivided += 1
            psi[:, j] = machine.step_column(
                psi[:, j], gens[j], counts[j], 0, seed, traj_offset + j
            )
    return psi, counts, subdivided


def mcwf_ensemble(
    model: LindbladModel,
    observables: Optional[dict] = None,
    config: Optional[TrajectoryConfig] = None,
    max_dim: int = DEFAULT_MAX_MCWF_DIM,
) -> EnsembleResult:
    """Monte-Carlo wave-function ensemble statistics at time tau.

    Evolves ``config.n_traj`` pure states under the non-Hermitian drift
    H - (i/2) sum_k rate_k C_k^dag C_k with first-order jump placement: each
    step applies the exact drift propagator, reads the jump probability off
    the norm loss, and on a jump applies a collapse operator chosen by rate
    weights.  Steps whose jump probability reaches ``max_jump_prob`` are
    re-run on that column at half the step, recursively.

    Phonon statistics use lab-frame number operators (frame shifts are folded
    into the polynomials), averaged over the ensemble, with bootstrap
    standard errors.  ``observables`` maps names to extra FockOperators whose
    final-time means and standard errors are reported alongside.
    """
    config = config or TrajectoryConfig()
    d = model.dims.dim
    if d > max_dim:
        raise SolverError(
            f"Hilbert dimension {d} exceeds the limit {max_dim} for dense "
            f"propagators; use a displaced-frame model, smaller Fock cutoffs, or "
            f"raise max_dim"
        )
    tau = _resolve_tau(model, config)
    center = _resolve_center(model, config)
    dt = _base_step(model, tau, config)
    n_steps = max(1, int(np.ceil(tau / dt - 1e-12)))
    dt = tau / n_steps
    machine = _JumpMachine(model, dt, config)

    gens = [
        np.random.default_rng(np.random.SeedSequence(entropy=config.seed, spawn_key=(j,)))
        for j in range(config.n_traj)
    ]
    psi0 = _initial_columns(model, config, gens, center)

    bounds = np.linspace(0, config.n_traj, config.workers + 1).astype(int)
    chunks = [
        (psi0[:, lo:hi], gens[lo:hi], lo)
        for lo, hi in zip(bounds[:-1], bounds[1:])
        if hi > lo
    ]
    if config.workers == 1 or len(chunks) == 1:
        results = [
            _run_chunk(machine, blk, gs, lo, n_steps, config.seed)
            for blk, gs, lo in chunks
        ]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = [
                pool.submit(_run_chunk, machine, blk, gs, lo, n_steps, config.seed)
                for blk, gs, lo in chunks
            ]
            results = [f.result() for f in futures]

    psi = np.concatenate([r[0] for r in results], axis=1)
    counts = np.concatenate([r[1] for r in results], axis=0)
    subdivided = sum(r[2] for r in results)

    n_op, n2_op = phonon_number_ops(model.dims, model.frame)

    def _traj_means(matrix: sp.csr_matrix) -> np.ndarray:
        return np.einsum("ij,ij->j", psi.conj(), matrix @ psi).real

    n_vals = _traj_means(n_op.data)
    n2_vals = _traj_means(n2_op.data)
    stats = ob.bootstrap_phonon_stats(
        n_vals, n2_vals, seed=config.seed, n_boot=config.bootstrap_samples
    )

    extra = {}
    for name, op in (observables or {}).items():
        vals = _traj_means(op.data)
        se = vals.std(ddof=1) / np.sqrt(len(vals)) if len(vals) > 1 else 0.0
        extra[name] = (float(vals.mean()), float(se))

    diagnostics = {
        "tau": tau,
        "dt": dt,
        "n_steps": n_steps,
        "initial_center": center,
        "subdivided_steps": int(subdivided),
        "total_jumps": int(counts.sum()),
        "jumps_per_channel": counts.sum(axis=0).tolist(),
    }
    return EnsembleResult(
        stats=stats,
        n_values=n_vals,
        n2_values=n2_vals,
        observables=extra,
        jump_counts=counts.sum(axis=1),
        diagnostics=diagnostics,
        final_states=psi if config.keep_states else None,
    )
