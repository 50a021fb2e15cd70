"""Lindblad models of the driven three-mode system.

Lab frame: H = iE(bdag - b) + g0 (a bdag c + adag b cdag), with photon loss at
rate kappa on both optical modes and thermal mechanical damping split into the
two channels gamma(1+nbar) D[c] and gamma nbar D[cdag].

Displaced frame: every mode is displaced by its semiclassical limit-cycle
amplitude (alpha0, beta0, zeta0).  Displacing a Lindblad equation leaves the
dissipators acting on the fluctuation operators and moves the classical
amplitudes into the Hamiltonian, which picks up linear counter-terms
(i rate/2)(amp* x - amp xdag) from each loss channel.  At the semiclassical
fixed point the drive and all linear terms cancel; the builder checks this
numerically instead of assuming it, because the cancellation is exactly the
statement that the frame sits on the classical solution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import hilbert as hb
from .analytics import BelowThreshold, LimitCycleSolution, SystemParams, limit_cycle


@dataclass(frozen=True)
class DisplacedFrame:
    """Classical amplitudes subtracted from each mode."""

    alpha0: complex
    beta0: complex
    zeta0: complex

    def displacement_operator(self, dims: hb.ModeDims) -> hb.FockOperator:
        """Truncated product D_a(alpha0) D_b(beta0) D_c(zeta0)."""
        d = hb.displacement(dims, "a", self.alpha0)
        d = d @ hb.displacement(dims, "b", self.beta0)
        return d @ hb.displacement(dims, "c", self.zeta0)


@dataclass(frozen=True, eq=False)
class LindbladModel:
    """Hamiltonian plus weighted collapse operators on a fixed truncation."""

    dims: hb.ModeDims
    hamiltonian: hb.FockOperator
    collapse: tuple  # of (FockOperator, rate) pairs, rates >= 0
    frame: Union[DisplacedFrame, None] = None
    params: Union[SystemParams, None] = None

    def __post_init__(self):
        if not self.hamiltonian.is_hermitian(1e-12):
            raise ValueError("Hamiltonian failed the Hermiticity check")
        for op, rate in self.collapse:
            if rate < 0:
                raise ValueError(f"collapse rate {rate} < 0")
            if op.dims != self.dims:
                raise ValueError("collapse operator dims do not match the model")


def build_model(p: SystemParams, dims: hb.ModeDims, frame: str = "lab") -> LindbladModel:
    """Assemble the Lindblad model at truncation ``dims`` in the requested frame.

    frame='lab' keeps the bare operators.  frame='displaced' moves to the
    semiclassical limit cycle (requires gain ratio > 1) where the residual
    dynamics involves only fluctuations and small Fock cutoffs suffice.
    """
    a = hb.destroy(dims, "a")
    b = hb.destroy(dims, "b")
    c = hb.destroy(dims, "c")
    gamma, nbar = p.gamma, p.nbar

    if frame == "lab":
        cubic = a @ b.dag() @ c
        H = 1j * p.E * (b.dag() - b) + p.g0 * (cubic + cubic.dag())
        frame_info = None
    elif frame == "displaced":
        sol = limit_cycle(p)
        if isinstance(sol, BelowThreshold):
            raise ValueError(
                f"displaced frame needs an above-threshold limit cycle "
                f"(gain ratio {sol.gain_ratio:.4g} <= 1)"
            )
        al, be, ze = sol.alpha0, sol.beta0, sol.zeta0
        A, B, C = a + al, b + be, c + ze
        cubic = A @ B.dag() @ C
        H = 1j * p.E * (B.dag() - B) + p.g0 * (cubic + cubic.dag())
        # counter-terms from displacing the loss channels
        H = H + (0.5j * p.kappa) * (np.conj(al) * a - al * a.dag())
        H = H + (0.5j * p.kappa) * (np.conj(be) * b - be * b.dag())
        H = H + (0.5j * gamma) * (np.conj(ze) * c - ze * c.dag())
        frame_info = DisplacedFrame(alpha0=al, beta0=be, zeta0=ze)
        _check_fixed_point_cancellation(H, dims, p.kappa)
    else:
        raise ValueError(f"unknown frame {frame!r}, expected 'lab' or 'displaced'")

    collapse = [(a, p.kappa), (b, p.kappa), (c, gamma * (1.0 + nbar))]
    if nbar > 0:
        collapse.append((c.dag(), gamma * nbar))
    return LindbladModel(dims=dims, hamiltonian=H, collapse=tuple(collapse), frame=frame_info, params=p)


def _check_fixed_point_cancellation(H: hb.FockOperator, dims: hb.ModeDims, kappa: float):
    """All single-excitation matrix elements from the global ground state must vanish."""
    ground = hb.vacuum(dims).data
    hg = H.data @ ground
    for occ in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
        try:
            one = hb.basis(dims, occ).data
        except ValueError:
            continue  # cutoff 1 in that mode: no excited state to test
        coeff = np.vdot(one, hg)
        if abs(coeff) > 1e-8 * kappa:
            raise AssertionError(
                f"linear term {occ} survived the frame displacement: |coeff| = {abs(coeff):.3e}"
            )


def frame_observable(model: LindbladModel, op: hb.FockOperator) -> hb.FockOperator:
    """Represent a lab-frame observable in the model's frame.

    Lab models pass through unchanged.  Displaced models conjugate by the
    truncated displacement, so expectation values taken against displaced
    states reproduce lab-frame values up to truncation tails.
    """
    if model.frame is None:
        return op
    d = model.frame.displacement_operator(model.dims)
    return d.dag() @ op @ d


def phonon_number_ops(dims: hb.ModeDims, frame: Union[DisplacedFrame, None] = None):
    """Lab-frame phonon number and its square, represented in ``frame``.

    In the displaced frame the lab operator c maps to c + zeta0 exactly, so
    n and n^2 are assembled from the shifted polynomial instead of a
    truncated-unitary conjugation; this stays exact away from the cutoff.
    """
    c = hb.destroy(dims, "c")
    C = c if frame is None else c + frame.zeta0
    n = C.dag() @ C
    return n, n @ n
