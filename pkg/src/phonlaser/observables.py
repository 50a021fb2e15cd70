"""Phonon counting statistics and Wigner-function negativity.

Quadrature convention: X = (c + cdag)/sqrt(2), Y = (c - cdag)/(i sqrt(2)),
so a coherent state of amplitude z sits at (x, p) = sqrt(2) (Re z, Im z) and
the Wigner function integrates to 1 over dx dp (vacuum peak 1/pi).
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import gammaln

from . import hilbert as hb
from .model import DisplacedFrame, phonon_number_ops


@dataclass(frozen=True)
class PhononStats:
    """Number statistics of the mechanical mode.

    fano is NaN and g2 is None for an empty mode (mean_n = 0), where both
    are 0/0.  Standard errors are filled only for trajectory ensembles.
    """

    mean_n: float
    mean_n2: float
    fano: float
    g2: Union[float, None]
    se_mean_n: Union[float, None] = None
    se_fano: Union[float, None] = None
    se_g2: Union[float, None] = None


def _stats_from_moments(mean_n: float, mean_n2: float) -> tuple[float, Union[float, None]]:
    if mean_n <= 0.0:
        return float("nan"), None
    fano = (mean_n2 - mean_n**2) / mean_n
    # (<n^2> - <n>)/<n>^2 is the normally ordered form; identical to 1 + (F-1)/<n>
    g2 = (mean_n2 - mean_n) / mean_n**2
    return fano, g2


def phonon_stats(state: hb.QuantumState, frame: Union[DisplacedFrame, None] = None) -> PhononStats:
    """Lab-frame phonon number statistics of a state given in ``frame``."""
    n_op, n2_op = phonon_number_ops(state.dims, frame)
    mean_n = n_op.expect(state).real
    mean_n2 = n2_op.expect(state).real
    fano, g2 = _stats_from_moments(mean_n, mean_n2)
    return PhononStats(mean_n=mean_n, mean_n2=mean_n2, fano=fano, g2=g2)


def bootstrap_phonon_stats(
    n_values: np.ndarray, n2_values: np.ndarray, seed: int = 0, n_boot: int = 200
) -> PhononStats:
    """Ensemble phonon statistics with bootstrap standard errors.

    ``n_values`` and ``n2_values`` are per-trajectory expectation values; the
    ensemble average plays the role of the mixed-state expectation.
    """
    n_values = np.asarray(n_values, dtype=float)
    n2_values = np.asarray(n2_values, dtype=float)
    n_traj = n_values.size
    if n_traj < 2:
        raise ValueError("need at least 2 trajectories for ensemble statistics")
    mean_n = float(n_values.mean())
    mean_n2 = float(n2_values.mean())
    fano, g2 = _stats_from_moments(mean_n, mean_n2)

    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0xB007,)))
    idx = rng.integers(0, n_traj, size=(n_boot, n_traj))
    bs_n = n_values[idx].mean(axis=1)
    bs_n2 = n2_values[idx].mean(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        bs_fano = (bs_n2 - bs_n**2) / bs_n
        bs_g2 = (bs_n2 - bs_n) / bs_n**2
    return PhononStats(
        mean_n=mean_n,
        mean_n2=mean_n2,
        fano=fano,
        g2=g2,
        se_mean_n=float(bs_n.std(ddof=1)),
        se_fano=float(np.nanstd(bs_fano, ddof=1)),
        se_g2=float(np.nanstd(bs_g2, ddof=1)) if g2 is not None else None,
    )


# -- Wigner function ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WignerGrid:
    """Wigner function W(x, p) sampled on a rectangular grid.

    values[i, j] = W(xs[i], ps[j]).  The normalization is
    integral W dx dp = 1, so the vacuum peaks at 1/pi.
    """

    xs: np.ndarray
    ps: np.ndarray
    values: np.ndarray

    @property
    def negativity(self) -> float:
        """Most negative value over the largest value; 0 is the classical floor."""
        w_max = self.values.max()
        if w_max <= 0:
            raise ValueError("Wigner grid has no positive values; window is off target")
        return float(self.values.min() / w_max)

    def integral(self) -> float:
        return float(np.trapezoid(np.trapezoid(self.values, self.ps, axis=1), self.xs))


def _single_mode_density(state: hb.QuantumState) -> np.ndarray:
    ns = state.dims.as_tuple()
    active = [n for n in ns if n > 1]
    if np.prod(ns) != max(ns) or len(active) > 1:
        raise ValueError(
            f"wigner needs a single-mode state; got dims {ns} "
            "(partial-trace the others first)"
        )
    return state.as_density()


def wigner(
    state: hb.QuantumState,
    xs: np.ndarray,
    ps: np.ndarray,
    offset: complex = 0.0,
) -> WignerGrid:
    """Wigner function of a single-mode state by the displaced-parity kernel.

    W(alpha) = (1/pi) Tr[rho D(2 alpha) Pi] with alpha = (x + i p)/sqrt(2),
    evaluated with a scaled associated-Laguerre recursion per sub-diagonal of
    rho (the exponential is folded into the starting values, so intermediates
    stay bounded).  ``offset`` shifts the evaluation frame: the returned grid
    is W of the state displaced by ``offset``, i.e. the kernel is evaluated
    at alpha - offset.  Negligible sub-diagonals of rho are skipped.
    """
    rho = _single_mode_density(state)
    dim = rho.shape[0]
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    alpha = (xs[:, None] + 1j * ps[None, :]) / np.sqrt(2.0) - offset
    y = 4.0 * np.abs(alpha) ** 2
    w = np.zeros(alpha.shape, dtype=float)

    scale = max(np.abs(rho).max(), 1e-300)
    phase = np.ones_like(alpha)
    nonzero = np.abs(alpha) > 0
    phase[nonzero] = np.conj(alpha[nonzero]) / np.abs(alpha[nonzero])
    log2a = np.full(alpha.shape, -np.inf)
    log2a[nonzero] = np.log(2.0 * np.abs(alpha[nonzero]))

    for d in range(dim):
        diag = np.diagonal(rho, offset=-d)  # rho[n+d, n]
        if np.abs(diag).max() < 1e-14 * scale:
            continue
        # sigma_n = (2 conj(alpha))^d sqrt(n!/(n+d)!) L_n^(d)(y) exp(-y/2)
        if d == 0:
            sigma_prev = np.exp(-0.5 * y).astype(complex)
        else:
            log_start = d * log2a - 0.5 * gammaln(d + 1) - 0.5 * y
            sigma_prev = np.exp(log_start) * phase**d
        acc = diag[0] * sigma_prev
        sigma = None
        for n in range(1, dim - d):
            if n == 1:
                sigma = sigma_prev * (1.0 + d - y) / np.sqrt(1.0 + d)
            else:
                m = n - 1
                sigma_next = (
                    (2 * m + 1 + d - y) * sigma - np.sqrt(m * (m + d)) * sigma_prev
                ) * (np.sqrt((m + 1.0) / (m + 1.0 + d)) / (m + 1.0))
                sigma_prev, sigma = sigma, sigma_next
            acc = acc + (diag[n] * (-1) ** n) * sigma
        if d == 0:
            w += acc.real
        else:
            w += 2.0 * acc.real
    return WignerGrid(xs=xs, ps=ps, values=w / np.pi)


def default_window(
    state: hb.QuantumState, frame: Union[DisplacedFrame, None] = None, points: int = 201
) -> tuple[np.ndarray, np.ndarray]:
    """Window centered on the lab-frame mean amplitude, sized by the quadrature spread."""
    rho = _single_mode_density(state)
    dim = rho.shape[0]
    dims1 = hb.ModeDims(1, 1, dim)
    c = hb.destroy(dims1, "c")
    st = hb.QuantumState(dims1, rho)
    mean_c = c.expect(st)
    if frame is not None:
        mean_c = mean_c + frame.zeta0
    x_op = (c + c.dag()) * (1 / np.sqrt(2))
    y_op = (c - c.dag()) * (-1j / np.sqrt(2))
    var_x = (x_op @ x_op).expect(st).real - x_op.expect(st).real ** 2
    var_y = (y_op @ y_op).expect(st).real - y_op.expect(st).real ** 2
    half = 4.0 * (np.sqrt(max(var_x, var_y, 0.0)) + 1.0)
    x0, p0 = np.sqrt(2.0) * mean_c.real, np.sqrt(2.0) * mean_c.imag
    xs = np.linspace(x0 - half, x0 + half, points)
    ps = np.linspace(p0 - half, p0 + half, points)
    return xs, ps


def mechanical_wigner(
    state: hb.QuantumState,
    frame: Union[DisplacedFrame, None] = None,
    xs: Union[np.ndarray, None] = None,
    ps: Union[np.ndarray, None] = None,
    points: int = 201,
) -> WignerGrid:
    """Lab-frame Wigner function of the mechanical mode of a three-mode state.

    Traces out the optical modes; for displaced-frame states the frame
    displacement re-enters as a rigid phase-space shift of the evaluation
    points (exact, no re-embedding).
    """
    reduced = hb.partial_trace(state, "c") if state.dims.dim > state.dims.n_c else state
    if xs is None or ps is None:
        xs_auto, ps_auto = default_window(reduced, frame=frame, points=points)
        xs = xs_auto if xs is None else np.asarray(xs)
        ps = ps_auto if ps is None else np.asarray(ps)
    offset = frame.zeta0 if frame is not None else 0.0
    grid = wigner(hb.QuantumState(reduced.dims, reduced.data), xs, ps, offset=offset)
    dx = xs[1] - xs[0] if len(xs) > 1 else 0.0
    spread = np.sqrt(0.5)  # vacuum feature size in x
    if dx > spread:
        warnings.warn(
            f"wigner grid spacing {dx:.3g} is coarser than the vacuum feature size; "
            "increase points or shrink the window",
            UserWarning,
            stacklevel=2,
        )
    return grid


def write_wigner_csv(grid: WignerGrid, path: str):
    """Long-format CSV: one (x, p, W) row per grid node."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "p", "W"])
        for i, x in enumerate(grid.xs):
            for j, p in enumerate(grid.ps):
                writer.writerow([f"{x:.12g}", f"{p:.12g}", f"{grid.values[i, j]:.12g}"])


def write_wigner_npz(grid: WignerGrid, path: str):
    """Compact binary raster with axes and the quadrature convention recorded."""
    np.savez_compressed(
        path,
        xs=grid.xs,
        ps=grid.ps,
        values=grid.values,
        convention=np.array("X=(c+cdag)/sqrt(2); integral W dx dp = 1"),
    )
