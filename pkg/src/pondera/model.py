"""Physical parameters, classical working point and noise spectra of the
driven cavity with a movable end mirror.

All quantities are SI. Frequencies are angular (rad/s).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .errors import ParameterError

HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K
C_LIGHT = 2.99792458e8  # m / s


@dataclass(frozen=True)
class PhysicalParams:
    """Experimental parameter set for N symmetrically driven cavity modes.

    ``detuning`` is the dimensionless overall detuning (bare detuning plus the
    radiation-pressure shift, in units of ``gamma_c``).
    """

    mode_count: int = 2
    omega_m: float = 1e6
    omega_0: float = 1e15
    mass: float = 1e-4
    cavity_length: float = 1e-3
    gamma_m: float = 1.0
    gamma_c: float = 1e6
    input_power: float = 13e-3
    temperature: float = 0.0
    detuning: float = 0.0
    hbar: float = field(default=HBAR, repr=False)
    k_B: float = field(default=K_B, repr=False)

    def __post_init__(self):
        errors = []
        if int(self.mode_count) != self.mode_count or self.mode_count < 1:
            errors.append(f"mode_count must be a positive integer, got {self.mode_count!r}")
        for name in ("omega_m", "omega_0", "mass", "cavity_length", "gamma_m", "gamma_c",
                     "hbar", "k_B"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                errors.append(f"{name} must be finite and > 0, got {value!r}")
        for name in ("input_power", "temperature"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                errors.append(f"{name} must be finite and >= 0, got {value!r}")
        if not math.isfinite(self.detuning):
            errors.append(f"detuning must be finite, got {self.detuning!r}")
        if errors:
            raise ParameterError("; ".join(errors))
        fsr = C_LIGHT / (2 * self.cavity_length)
        if self.omega_m > 0.01 * fsr:
            warnings.warn(
                f"omega_m = {self.omega_m:g} is not small against the free spectral "
                f"range c/2L = {fsr:g}; the single-mode adiabatic picture is doubtful",
                stacklevel=3,
            )

    def with_(self, **changes) -> PhysicalParams:
        return replace(self, **changes)


def table_one(detuning: float = 0.0, temperature: float = 0.0, mode_count: int = 2) -> PhysicalParams:
    """Reference parameter values (13 mW per mode on a 0.1 g mirror)."""
    return PhysicalParams(mode_count=mode_count, detuning=detuning, temperature=temperature)


@dataclass(frozen=True)
class SteadyState:
    """Classical working point; ``alpha`` is real and ``alpha**2`` is the
    mean intracavity photon number per mode."""

    x: float
    y: float
    alpha: float
    alpha_in_sq: float
    G: float
    detuning: float

    @property
    def alpha_sq(self) -> float:
        return self.alpha * self.alpha


class BistableBranch(NamedTuple):
    x: float
    detuning: float
    alpha_sq: float


def derive_coupling(params: PhysicalParams) -> float:
    """Optomechanical coupling G = omega_0 / L, in 1/(m s)."""
    return params.omega_0 / params.cavity_length


def input_amplitude_sq(params: PhysicalParams) -> float:
    """Input photon flux |alpha_in|^2 = P_in / (hbar omega_0), photons/s."""
    return params.input_power / (params.hbar * params.omega_0)


def _displacement(params: PhysicalParams, G: float, alpha_sq: float) -> float:
    return 2 * params.hbar * G * params.mode_count * alpha_sq / (params.mass * params.omega_m**2)


def steady_state_from_detuning(params: PhysicalParams) -> SteadyState:
    """Working point for a given overall detuning (the detuning is an input,
    not solved for)."""
    G = derive_coupling(params)
    ain_sq = input_amplitude_sq(params)
    alpha_sq = ain_sq / (params.gamma_c * (0.25 + params.detuning**2))
    return SteadyState(
        x=_displacement(params, G, alpha_sq),
        y=0.0,
        alpha=math.sqrt(alpha_sq),
        alpha_in_sq=ain_sq,
        G=G,
        detuning=params.detuning,
    )


def _pressure_shift(params: PhysicalParams) -> float:
    # d(detuning)/d(alpha^2) in units of gamma_c: G * dx/d(alpha^2) / gamma_c
    G = derive_coupling(params)
    return 2 * params.hbar * G**2 * params.mode_count / (params.mass * params.omega_m**2)


def bistability_cubic(params: PhysicalParams, bare_detuning: float) -> np.ndarray:
    """Coefficients (highest power first) of the self-consistency cubic in
    alpha^2 for bare detuning ``omega_0 - omega_c``."""
    gc = params.gamma_c
    beta = _pressure_shift(params)
    return np.array([
        beta**2 / gc,
        2 * bare_detuning * beta / gc,
        gc / 4 + bare_detuning**2 / gc,
        -input_amplitude_sq(params),
    ])


def bistability_residual(params: PhysicalParams, bare_detuning: float, alpha_sq: float) -> float:
    """Cubic residual divided by the sum of the magnitudes of its terms."""
    coeffs = bistability_cubic(params, bare_detuning)
    terms = coeffs * alpha_sq ** np.arange(3, -1, -1)
    scale = np.abs(terms).sum()
    return float(abs(terms.sum()) / scale) if scale > 0 else 0.0


def solve_bistability(params: PhysicalParams, bare_detuning: float) -> list[BistableBranch]:
    """All real working points for a given bare detuning, ascending in alpha^2.

    The cubic is solved in the dimensionless detuning D, where it reads
    (D - d)(1/4 + D^2) = p with d = bare_detuning/gamma_c; this form stays
    well conditioned when the radiation-pressure shift is tiny.
    """
    gc = params.gamma_c
    ain_sq = input_amplitude_sq(params)
    d = bare_detuning / gc
    p = _pressure_shift(params) * ain_sq / gc**2
    coeffs = [1.0, -d, 0.25, -(d / 4 + p)]

    def f(D):
        return (D - d) * (0.25 + D * D) - p

    def fprime(D):
        return (0.25 + D * D) + 2 * D * (D - d)

    # discriminant of the monic cubic decides between one and three real roots
    a, b, c = coeffs[1], coeffs[2], coeffs[3]
    disc = 18 * a * b * c - 4 * a**3 * c + a**2 * b**2 - 4 * b**3 - 27 * c**2
    roots = np.roots(coeffs)
    if disc >= 0:
        real = np.sort(roots.real)
    else:
        real = np.array([roots[np.argmin(np.abs(roots.imag))].real])

    branches = []
    for D in real:
        for _ in range(4):
            step = f(D) / fprime(D) if fprime(D) != 0 else 0.0
            D -= step
            if step == 0:
                break
        alpha_sq = ain_sq / (gc * (0.25 + D * D))
        branches.append(BistableBranch(
            x=_displacement(params, derive_coupling(params), alpha_sq),
            detuning=float(D),
            alpha_sq=float(alpha_sq),
        ))
    branches.sort(key=lambda b: b.alpha_sq)
    return branches


def mirror_susceptibility(omega, params: PhysicalParams):
    """chi(omega) = 1 / (m (omega_m^2 - omega^2 + 2 i gamma_m omega)), s^2/kg."""
    omega = np.asarray(omega, dtype=float)
    chi = 1.0 / (params.mass * (params.omega_m**2 - omega**2 + 2j * params.gamma_m * omega))
    return chi[()] if chi.ndim == 0 else chi


def _x_coth_x(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-6
    safe = np.where(small, 1.0, x)
    tiny = np.where(small, x, 0.0)
    return np.where(small, 1.0 + tiny * tiny / 3.0, safe / np.tanh(safe))


def thermal_noise_psd(omega, params: PhysicalParams):
    """Brownian force spectrum, coefficient of delta(omega + omega') as printed:

        S(omega) = (1 + coth(hbar omega / 2 k_B T)) (m gamma_m hbar / pi) omega

    with the T = 0 limit coth -> sign(omega) and the omega -> 0 limit
    S(0) = 2 m gamma_m k_B T / pi.
    """
    omega = np.asarray(omega, dtype=float)
    pref = params.mass * params.gamma_m * params.hbar / np.pi
    kT = params.k_B * params.temperature
    if kT == 0:
        out = pref * omega * (1 + np.sign(omega))
    else:
        x = params.hbar * omega / (2 * kT)
        # omega * coth(x) = (2 kT / hbar) * x coth(x)
        out = pref * (omega + (2 * kT / params.hbar) * _x_coth_x(x))
    return out[()] if out.ndim == 0 else out


def thermal_excess_psd(omega, params: PhysicalParams):
    """Temperature-dependent part of :func:`thermal_noise_psd`,
    S(omega; T) - S(omega; 0) = (2 m gamma_m hbar / pi) |omega| nbar(|omega|).

    Even in omega and nonnegative.
    """
    omega = np.abs(np.asarray(omega, dtype=float))
    pref = 2 * params.mass * params.gamma_m * params.hbar / np.pi
    kT = params.k_B * params.temperature
    if kT == 0:
        out = np.zeros_like(omega)
    else:
        x = params.hbar * omega / kT
        # |omega| nbar = (kT/hbar) * x / expm1(x), -> kT/hbar at omega = 0
        small = x < 1e-12
        safe = np.where(small, 1.0, x)
        with np.errstate(over="ignore"):  # expm1 -> inf gives the correct 0
            out = pref * (kT / params.hbar) * np.where(small, 1.0 - x / 2, safe / np.expm1(safe))
    return out[()] if out.ndim == 0 else out


def quantum_force_psd(omega, params: PhysicalParams):
    """Zero-temperature force spectrum that keeps the mirror commutator
    canonical in the output-field frequency convention:
    2 m gamma_m hbar (|omega| - omega)."""
    omega = np.asarray(omega, dtype=float)
    out = 2 * params.mass * params.gamma_m * params.hbar * (np.abs(omega) - omega)
    return out[()] if out.ndim == 0 else out


NOISE_MODELS = ("canonical", "verbatim")


def force_noise_psd(omega, params: PhysicalParams, noise_model: str = "canonical"):
    """Force spectrum that drives the output fields.

    ``canonical``: quantum part from :func:`quantum_force_psd` plus the
    thermal excess of :func:`thermal_noise_psd`. ``verbatim``: the printed
    spectrum itself (its commutator part is not canonical).
    """
    if noise_model == "canonical":
        return quantum_force_psd(omega, params) + thermal_excess_psd(omega, params)
    if noise_model == "verbatim":
        return thermal_noise_psd(omega, params)
    raise ParameterError(f"unknown noise model {noise_model!r}; expected one of {NOISE_MODELS}")


def stability_margin(params: PhysicalParams, steady: SteadyState | None = None) -> float:
    """Largest real part (1/s) of the eigenvalues of the linearized dynamics
    (mirror plus N modes). Positive means the working point is unstable."""
    steady = steady or steady_state_from_detuning(params)
    n = params.mode_count
    a = steady.alpha
    G = steady.G
    drift = np.zeros((2 + 2 * n, 2 + 2 * n))
    drift[0, 1] = 1 / params.mass
    drift[1, 0] = -params.mass * params.omega_m**2
    drift[1, 1] = -2 * params.gamma_m
    gc, D = params.gamma_c, params.detuning
    for k in range(n):
        i = 2 + 2 * k
        drift[1, i] = math.sqrt(2) * params.hbar * G * a
        drift[i:i + 2, i:i + 2] = [[-gc / 2, -D * gc], [D * gc, -gc / 2]]
        drift[i + 1, 0] = math.sqrt(2) * G * a
    return float(np.linalg.eigvals(drift).real.max())
