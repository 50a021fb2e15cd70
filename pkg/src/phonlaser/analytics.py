"""Semiclassical theory of the three-mode phonon laser.

A strong drive E on optical mode b scatters into mode a while creating or
absorbing phonons in mode c.  Adiabatic elimination of the optical modes
turns the scattering into a mechanical gain whose saturation defines a limit
cycle; amplitude fluctuations around that cycle obey a one-dimensional
Ornstein-Uhlenbeck law with relaxation rate Gamma and diffusion D, which
fixes the Fano factor and the phonon g2(0).

All closed forms below take rates in one consistent unit system (kappa = 1
is convenient); only :func:`drive_from_power` and :func:`thermal_occupation`
deal in SI quantities.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.constants import hbar, k as k_B
from scipy.integrate import solve_ivp


class NoAntibunchingError(ValueError):
    """Sub-Poissonian output is impossible for bath occupation >= 1."""


@dataclass(frozen=True)
class CoolingChannel:
    """Extra cold damping gamma_L supplied by a resolved-sideband cooling drive.

    The cooling cavity linewidth kappa_d sets the channel's own quantum
    limit n_L = (kappa_d / 4 omega_m)^2.
    """

    gamma_L: float
    kappa_d: float

    def __post_init__(self):
        if self.gamma_L < 0 or self.kappa_d < 0:
            raise ValueError("cooling rates must be >= 0")


@dataclass(frozen=True)
class SystemParams:
    """Rates of the three-mode system, all in the same units.

    g0      single-photon optomechanical coupling
    kappa   linewidth of both optical modes
    gamma0  intrinsic mechanical energy damping rate
    nbar0   thermal occupation of the intrinsic mechanical bath
    E       coherent drive amplitude on mode b
    omega_m mechanical frequency (optional; only validity checks and the
            cooling quantum limit need it)
    cooling optional extra cold damping channel
    """

    g0: float
    kappa: float
    gamma0: float
    E: float
    nbar0: float = 0.0
    omega_m: Union[float, None] = None
    cooling: Union[CoolingChannel, None] = None

    def __post_init__(self):
        if self.g0 <= 0 or self.kappa <= 0 or self.gamma0 <= 0:
            raise ValueError("g0, kappa, gamma0 must be > 0")
        if self.E < 0 or self.nbar0 < 0:
            raise ValueError("E and nbar0 must be >= 0")
        if self.omega_m is not None and self.omega_m <= 0:
            raise ValueError("omega_m must be > 0 when given")

    @property
    def gamma(self) -> float:
        """Total mechanical damping: intrinsic plus cooling channel."""
        return self.gamma0 + (self.cooling.gamma_L if self.cooling else 0.0)

    @property
    def nbar(self) -> float:
        """Effective bath occupation seen by the total damping."""
        if self.cooling is None:
            return self.nbar0
        if self.omega_m is None:
            raise ValueError("omega_m is required to evaluate the cooling quantum limit")
        n_L = cooling_quantum_limit(self.cooling.kappa_d, self.omega_m)
        return effective_bath(self.gamma0, self.nbar0, self.cooling.gamma_L, n_L)[1]


@dataclass(frozen=True)
class BelowThreshold:
    """Typed outcome for gain ratio <= 1: no limit cycle exists."""

    gain_ratio: float


def _h(p: SystemParams, zeta: complex) -> float:
    # Lorentzian denominator of the adiabatic optical response
    return p.g0**2 * abs(zeta) ** 2 + p.kappa**2 / 4.0


def optical_amplitudes(p: SystemParams, zeta: complex) -> tuple[complex, complex]:
    """Adiabatic optical amplitudes (alpha, beta) at mechanical amplitude zeta."""
    h = _h(p, zeta)
    beta = p.E * p.kappa / (2.0 * h)
    alpha = -1j * p.E * p.g0 * np.conj(zeta) / h
    return alpha, beta


def optical_gain(p: SystemParams, zeta: complex) -> float:
    """Mechanical anti-damping from the optical scattering; negative by convention."""
    return -p.g0**2 * p.E**2 * p.kappa / _h(p, zeta) ** 2


def optical_diffusion(p: SystemParams, zeta: complex) -> float:
    """Quadrature diffusion fed back by the optical vacuum noise."""
    alpha, beta = optical_amplitudes(p, zeta)
    return p.g0**2 * (p.kappa / 2.0) * (abs(alpha) ** 2 + abs(beta) ** 2) / _h(p, zeta)


def gain_ratio(p: SystemParams) -> float:
    """Pump parameter: small-amplitude gain over mechanical damping, 16 g0^2 E^2 / (kappa^3 gamma)."""
    return 16.0 * p.g0**2 * p.E**2 / (p.kappa**3 * p.gamma)


@dataclass(frozen=True)
class LimitCycleSolution:
    """Above-threshold operating point and its fluctuation statistics.

    zeta0 is taken real and positive (the cycle phase is free); amplitudes
    alpha0, beta0 follow adiabatically.  Gamma and D are the relaxation rate
    and diffusion of the amplitude quadrature; fano and g2 are the phonon
    number statistics they imply, and n_ph is the total intracavity photon
    number on the cycle.
    """

    gain_ratio: float
    zeta0: float
    alpha0: complex
    beta0: complex
    Gamma: float
    D: float
    Gamma_opt: float
    D_opt: float
    fano: float
    mean_n: float
    g2: float
    n_ph: float


def limit_cycle(p: SystemParams) -> Union[LimitCycleSolution, BelowThreshold]:
    """Solve the saturated gain condition for the limit cycle, or report no cycle."""
    R = gain_ratio(p)
    if R <= 1.0:
        return BelowThreshold(gain_ratio=R)
    sqrtR = np.sqrt(R)
    gamma, nbar = p.gamma, p.nbar
    zeta0 = (p.kappa / (2.0 * p.g0)) * np.sqrt(sqrtR - 1.0)
    alpha0, beta0 = optical_amplitudes(p, zeta0)

    # saturated-gain checks: gain exactly cancels damping on the cycle
    assert abs(optical_gain(p, zeta0) + gamma) < 1e-10 * gamma

    Gamma_opt = gamma * (3.0 - 4.0 / sqrtR)
    Gamma = 4.0 * gamma * (1.0 - 1.0 / sqrtR)
    assert abs((gamma + Gamma_opt) - Gamma) < 1e-10 * gamma
    D_opt = optical_diffusion(p, zeta0)
    assert abs(D_opt - gamma / 2.0) < 1e-10 * gamma
    D = gamma * (0.5 + nbar) + D_opt

    F = 0.5 * (1.0 + nbar) / (1.0 - 1.0 / sqrtR)
    mean_n = zeta0**2
    g2 = 1.0 + 4.0 * (p.g0 / p.kappa) ** 2 * (F - 1.0) / (sqrtR - 1.0)
    n_ph = abs(alpha0) ** 2 + abs(beta0) ** 2
    return LimitCycleSolution(
        gain_ratio=R,
        zeta0=zeta0,
        alpha0=alpha0,
        beta0=beta0,
        Gamma=Gamma,
        D=D,
        Gamma_opt=Gamma_opt,
        D_opt=D_opt,
        fano=F,
        mean_n=mean_n,
        g2=g2,
        n_ph=n_ph,
    )


def fano(p: SystemParams) -> Union[float, BelowThreshold]:
    """Fano factor of the phonon number on the limit cycle."""
    R = gain_ratio(p)
    if R <= 1.0:
        return BelowThreshold(gain_ratio=R)
    return 0.5 * (1.0 + p.nbar) / (1.0 - 1.0 / np.sqrt(R))


def g2_from_fano(fano_value: float, mean_n: float) -> float:
    """Equal-time phonon g2(0) given Fano factor and mean occupation."""
    if mean_n <= 0:
        raise ValueError("mean_n must be > 0")
    return 1.0 + (fano_value - 1.0) / mean_n


def g2_limit_cycle(p: SystemParams) -> Union[float, BelowThreshold]:
    """g2(0) on the limit cycle; scales as (g0/kappa)^2 around 1."""
    sol = limit_cycle(p)
    return sol.g2 if isinstance(sol, LimitCycleSolution) else sol


@dataclass(frozen=True)
class OperatingPoint:
    """Operating point minimizing g2(0) at fixed g0/kappa and bath occupation.

    n_ph_scaled is the intracavity photon number in units of
    kappa*gamma/(4 g0^2); it equals sqrt(gain_ratio) on the cycle.
    """

    n_ph_scaled: float
    gain_ratio: float
    g2: float


def optimal_operating_point(g0_over_kappa: float, nbar: float = 0.0) -> OperatingPoint:
    """Pump strength that minimizes g2(0), and the value attained there."""
    if nbar >= 1.0:
        raise NoAntibunchingError(
            f"effective bath occupation {nbar} >= 1: g2(0) < 1 is unreachable; "
            "cool the mechanical bath first"
        )
    if nbar < 0 or g0_over_kappa <= 0:
        raise ValueError("need g0_over_kappa > 0 and 0 <= nbar < 1")
    s = (3.0 + nbar) / (1.0 - nbar)
    g2 = 1.0 - 0.5 * g0_over_kappa**2 * (1.0 - nbar) ** 2 / (1.0 + nbar)
    return OperatingPoint(n_ph_scaled=s, gain_ratio=s**2, g2=g2)


# -- bath engineering ------------------------------------------------------

def thermal_occupation(omega: float, temperature: float) -> float:
    """Bose occupation 1/(exp(hbar omega / kB T) - 1); omega in rad/s, T in K."""
    if omega <= 0:
        raise ValueError("omega must be > 0")
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    if temperature == 0.0:
        return 0.0
    return 1.0 / np.expm1(hbar * omega / (k_B * temperature))


def drive_from_power(power: float, omega_b: float, kappa: float) -> float:
    """Drive amplitude E = sqrt(kappa P / (hbar omega_b)), all SI (omega, kappa in rad/s)."""
    if power < 0 or omega_b <= 0 or kappa <= 0:
        raise ValueError("need power >= 0, omega_b > 0, kappa > 0")
    return np.sqrt(kappa * power / (hbar * omega_b))


def cooling_quantum_limit(kappa_d: float, omega_m: float) -> float:
    """Minimum occupation (kappa_d / 4 omega_m)^2 of a sideband-cooling channel."""
    if omega_m <= 0:
        raise ValueError("omega_m must be > 0")
    return (kappa_d / (4.0 * omega_m)) ** 2


def effective_bath(gamma0: float, nbar0: float, gamma_L: float, nbar_L: float) -> tuple[float, float]:
    """Combine intrinsic and cooling baths: rates add, occupations average by rate."""
    gamma = gamma0 + gamma_L
    nbar = (gamma0 * nbar0 + gamma_L * nbar_L) / gamma
    return gamma, nbar


# -- classical dynamics (non-adiabatic oracle) ------------------------------

@dataclass(frozen=True)
class ClassicalTrajectory:
    """Noise-free mean-field trajectory of (alpha, beta, zeta)."""

    t: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    zeta: np.ndarray

    @property
    def final(self) -> tuple[complex, complex, complex]:
        return complex(self.alpha[-1]), complex(self.beta[-1]), complex(self.zeta[-1])


def classical_evolve(
    p: SystemParams,
    t_end: float,
    alpha0: complex = 0.0,
    beta0: complex = 0.0,
    zeta0: complex = 0.0,
    n_samples: int = 400,
    rtol: float = 1e-9,
) -> ClassicalTrajectory:
    """Integrate the full (non-adiabatic) mean-field equations.

    d alpha/dt = -i g0 beta zeta* - kappa/2 alpha
    d beta/dt  = -i g0 alpha zeta - kappa/2 beta + E
    d zeta/dt  = -i g0 alpha* beta - gamma/2 zeta

    Uses an adaptive embedded Runge-Kutta scheme at the given relative
    tolerance.  This deliberately retains the optical dynamics, so it serves
    as an independent check of the adiabatic limit-cycle formulas.
    """
    g0, kappa, gamma, E = p.g0, p.kappa, p.gamma, p.E

    def rhs(_t, y):
        al, be, ze = y
        return np.array(
            [
                -1j * g0 * be * np.conj(ze) - 0.5 * kappa * al,
                -1j * g0 * al * ze - 0.5 * kappa * be + E,
                -1j * g0 * np.conj(al) * be - 0.5 * gamma * ze,
            ],
            dtype=complex,
        )

    y0 = np.array([alpha0, beta0, zeta0], dtype=complex)
    t_eval = np.linspace(0.0, t_end, n_samples)
    sol = solve_ivp(rhs, (0.0, t_end), y0, method="DOP853", rtol=rtol, atol=1e-12, t_eval=t_eval)
    if not sol.success:
        raise RuntimeError(f"classical integration failed: {sol.message}")
    return ClassicalTrajectory(t=sol.t, alpha=sol.y[0], beta=sol.y[1], zeta=sol.y[2])


# -- regime-of-validity bookkeeping -----------------------------------------

@dataclass(frozen=True)
class ValidityReport:
    """Smallness ratios behind the adiabatic single-quadrature treatment.

    Every entry of ``ratios`` should be << 1; entries above 0.1 are listed
    in ``flags``.  ``enhancement`` is the factor 4 (omega_m/kappa)^2 by which
    the two-mode scheme relaxes the usual single-photon-coupling requirement
    (None when omega_m is not set).
    """

    ratios: dict
    flags: list
    enhancement: Union[float, None]

    @property
    def ok(self) -> bool:
        return not self.flags


def validity_report(p: SystemParams, zeta: Union[complex, None] = None) -> ValidityReport:
    """Check the hierarchy of scales at amplitude zeta (default: the limit cycle)."""
    if zeta is None:
        sol = limit_cycle(p)
        zeta = sol.zeta0 if isinstance(sol, LimitCycleSolution) else 0.0
    alpha, beta = optical_amplitudes(p, zeta)
    ratios = {
        "thermal_decoherence": (p.nbar + 1.0) * p.gamma / p.kappa,
        "coupling_alpha": p.g0 * abs(alpha) / p.kappa,
        "coupling_beta": p.g0 * abs(beta) / p.kappa,
    }
    enhancement = None
    if p.omega_m is not None:
        ratios["sideband_resolution"] = p.kappa / p.omega_m
        enhancement = 4.0 * (p.omega_m / p.kappa) ** 2
    flags = [name for name, r in ratios.items() if r > 0.1]
    return ValidityReport(ratios=ratios, flags=flags, enhancement=enhancement)
