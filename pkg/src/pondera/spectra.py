"""Linear response of the output fields and their frequency-resolved
covariance matrix.

Quadrature vectors are ordered (X_1, Y_1, ..., X_N, Y_N). A quadrature
pair obeys [X(omega), Y(omega')] = i delta(omega + omega'), so vacuum has
variance 1/2.

The mirror response at omega ~ omega_m is enhanced by omega_m/(2 gamma_m),
and covariance entries then span more than fourteen decades while the
entanglement markers built from them are of order one. Everything here is
therefore evaluated with gmpy2 multiple-precision numbers at ``PRECISION``
decimal digits, inside :func:`precise`; float64 copies are provided for
inspection and output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import gmpy2
import numpy as np
from mpmath.ctx_mp import MPContext

from . import model
from .errors import (AssemblyError, BlockStructureError, CommutatorError,
                     DegenerateFrequencyError, ParameterError)
from .model import PhysicalParams, SteadyState

PRECISION = 64
AMPLIFICATION_LIMIT = 1e12
COMMUTATOR_TOL = 1e-9
BLOCK_TOL = 1e-9
IMAG_TOL = 1e-10

mpfr, mpc = gmpy2.mpfr, gmpy2.mpc


def precise():
    """Context manager activating gmpy2 arithmetic at ``PRECISION`` digits.

    gmpy2 contexts are thread local, so concurrent callers do not interfere.
    Markers and fidelities of precise blocks must be evaluated inside it.
    """
    bits = math.ceil(PRECISION * math.log2(10)) + 8
    return gmpy2.context(gmpy2.get_context(), precision=bits, real_prec=bits, imag_prec=bits)


def to_numpy(mat, dtype=complex) -> np.ndarray:
    """float64/complex128 copy of a high-precision matrix."""
    conv = complex if dtype is complex else (lambda x: float(x.real))
    return np.array([[conv(x) for x in row] for row in np.asarray(mat)], dtype=dtype)


def mp_array(rows) -> np.ndarray:
    """Object array of gmpy2 scalars; arithmetic is exact to working precision."""
    return np.array(rows, dtype=object)


def mp_zeros(rows: int, cols: int) -> np.ndarray:
    return mp_array([[mpfr(0)] * cols for _ in range(rows)])


def mp_eye(n: int) -> np.ndarray:
    out = mp_zeros(n, n)
    for j in range(n):
        out[j, j] = mpfr(1)
    return out


def mp_inverse(mat: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse with partial pivoting; ZeroDivisionError if singular."""
    n = mat.shape[0]
    a = [list(row) + [mpfr(1) if i == j else mpfr(0) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(a[r][col]))
        if a[pivot][col] == 0:
            raise ZeroDivisionError("matrix is singular")
        a[col], a[pivot] = a[pivot], a[col]
        inv_p = 1 / a[col][col]
        row = [x * inv_p for x in a[col]]
        a[col] = row
        for r in range(n):
            if r != col:
                f = a[r][col]
                if f != 0:
                    a[r] = [x - f * y for x, y in zip(a[r], row)]
    return mp_array([r[n:] for r in a])


def _inf_norm(mat: np.ndarray):
    return max(sum(abs(x) for x in row) for row in mat)


def symplectic_form(n: int) -> np.ndarray:
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class FrequencyResponse:
    """Drift matrix and derived response at one frequency (object arrays of
    gmpy2 numbers)."""

    omega: float
    M: object
    L: object
    L_inv: object
    K: object
    s: object
    chi: object
    amplification: float


@dataclass(frozen=True)
class CovarianceMatrix:
    omega: float
    temperature: float
    V: np.ndarray
    c_omega: float
    precise: np.ndarray  # object array, same entries as V at working precision

    @property
    def mode_count(self) -> int:
        return self.V.shape[0] // 2

    @property
    def A(self) -> np.ndarray:
        return self.V[0:2, 0:2]

    @property
    def C(self) -> np.ndarray | None:
        return self.V[0:2, 2:4] if self.mode_count > 1 else None

    def block(self, j: int, k: int, precise: bool = True):
        if precise:
            return self.precise[2 * j:2 * j + 2, 2 * k:2 * k + 2]
        return self.V[2 * j:2 * j + 2, 2 * k:2 * k + 2]

    def blocks(self, precise: bool = True):
        """(A, C): diagonal block of mode 1 and the mode-1/mode-2 block."""
        return self.block(0, 0, precise), self.block(0, 1, precise)


def build_drift(omega: float, params: PhysicalParams, steady: SteadyState,
                amplification_limit: float = AMPLIFICATION_LIMIT) -> FrequencyResponse:
    """Assemble M(omega), L = i omega I - M, K = gamma_c L^-1 - I and the
    force-coupling vector s at a single frequency.

    Raises DegenerateFrequencyError when gamma_c * ||L^-1|| exceeds
    ``amplification_limit`` (a pole of the response on the real axis).
    """
    with precise():
        return _build_drift(omega, params, steady, amplification_limit)


def _build_drift(omega, params, steady, amplification_limit):
    n = params.mode_count
    w = mpfr(omega)
    m, wm, gm = mpfr(params.mass), mpfr(params.omega_m), mpfr(params.gamma_m)
    gc, delta = mpfr(params.gamma_c), mpfr(params.detuning)
    G, alpha = mpfr(steady.G), mpfr(steady.alpha)
    hbar = mpfr(params.hbar)

    chi = 1 / (m * mpc(wm * wm - w * w, 2 * gm * w))
    kappa = 2 * hbar * G * G * chi * alpha * alpha

    M = mp_zeros(2 * n, 2 * n)
    for j in range(n):
        for k in range(n):
            M[2 * j + 1, 2 * k] = kappa
        M[2 * j, 2 * j] = -gc / 2
        M[2 * j + 1, 2 * j + 1] = -gc / 2
        M[2 * j, 2 * j + 1] = -delta * gc
        M[2 * j + 1, 2 * j] += delta * gc
    eye = mp_eye(2 * n)
    L = eye * mpc(0, w) - M
    try:
        L_inv = mp_inverse(L)
    except ZeroDivisionError:
        raise DegenerateFrequencyError(omega, float("inf")) from None
    amplification = float(gc * _inf_norm(L_inv))
    if not amplification <= amplification_limit:
        raise DegenerateFrequencyError(omega, amplification)
    K = L_inv * gc - eye
    s = mp_zeros(2 * n, 1)
    for j in range(n):
        s[2 * j + 1] = -gmpy2.sqrt(mpfr(2)) * G * chi * alpha
    return FrequencyResponse(float(omega), M, L, L_inv, K, s, chi, amplification)


def input_correlations(n: int):
    """Unsymmetrized vacuum input correlations <v_in(w) v_in(-w)^T>."""
    N_in = mp_zeros(2 * n, 2 * n)
    half = mpfr(0.5)
    for j in range(n):
        N_in[2 * j, 2 * j] = half
        N_in[2 * j + 1, 2 * j + 1] = half
        N_in[2 * j, 2 * j + 1] = mpc(0, half)
        N_in[2 * j + 1, 2 * j] = mpc(0, -half)
    return N_in


def correlation_parts(fr: FrequencyResponse, fr_neg: FrequencyResponse, params: PhysicalParams):
    """Split U(omega) = U_in + S_xi(omega) * U_force into the input-noise
    part and the unit-strength force-noise part."""
    with precise():
        n = params.mode_count
        U_in = fr.K @ input_correlations(n) @ fr_neg.K.T
        U_force = (fr.L_inv @ fr.s) @ (fr_neg.L_inv @ fr_neg.s).T * mpfr(params.gamma_c)
        return U_in, U_force


def _force_psd(omega: float, params: PhysicalParams, noise_model: str):
    """High-precision force spectrum (same formulas as model.force_noise_psd)."""
    if noise_model not in model.NOISE_MODELS:
        raise ParameterError(f"unknown noise model {noise_model!r}; expected one of {model.NOISE_MODELS}")
    with precise():
        w = mpfr(omega)
        m, gm, hbar = mpfr(params.mass), mpfr(params.gamma_m), mpfr(params.hbar)
        kT = mpfr(params.k_B) * mpfr(params.temperature)
        pi = gmpy2.const_pi()
        if noise_model == "canonical":
            out = 2 * m * gm * hbar * (abs(w) - w)
            if kT > 0:
                if w == 0:
                    out += 2 * m * gm * kT / pi
                else:
                    out += 2 * m * gm * hbar / pi * abs(w) / gmpy2.expm1(hbar * abs(w) / kT)
            return out
        pref = m * gm * hbar / pi
        if kT == 0:
            return pref * w * (1 + (w > 0) - (w < 0))
        if w == 0:
            return 2 * m * gm * kT / pi
        return pref * w * (1 + gmpy2.coth(hbar * w / (2 * kT)))


def unsymmetrized_output_correlations(omega: float, fr: FrequencyResponse, fr_neg: FrequencyResponse,
                                      params: PhysicalParams, noise_model: str = "canonical"):
    """U(omega) = <v_out(omega) v_out(-omega)^T> (coefficient of the delta)."""
    U_in, U_force = correlation_parts(fr, fr_neg, params)
    S = _force_psd(omega, params, noise_model)
    with precise():
        return U_in + U_force * S


def _commutator(U_pos, U_neg, n: int, strict: bool = True):
    """c(omega) from Lambda = U(w) - U(-w)^T averaged over +-omega, plus the
    consistency checks (forbidden elements, per-mode equality, positivity)."""
    lam = (U_pos - U_neg.T + (U_neg - U_pos.T)) / 2  # symmetric in +-omega
    per_mode = [lam[2 * j, 2 * j + 1] / mpc(0, 1) for j in range(n)]
    c = per_mode[0]
    problems = []
    if abs(c.imag) > COMMUTATOR_TOL or c.real <= 0:
        problems.append(f"c = {complex(c)} is not real positive")
    for j, cj in enumerate(per_mode[1:], start=2):
        if abs(cj - c) > COMMUTATOR_TOL * abs(c):
            problems.append(f"mode {j} commutator {complex(cj)} differs from mode 1 {complex(c)}")
    worst = mpfr(0)
    for a in range(2 * n):
        for b in range(2 * n):
            if a // 2 == b // 2 and a != b:
                continue
            worst = max(worst, abs(lam[a, b]))
    if worst > COMMUTATOR_TOL * abs(c):
        problems.append(f"forbidden commutator of size {float(worst):.3g}")
    if problems and strict:
        raise CommutatorError("; ".join(problems))
    return c.real


def commutator_scale(omega: float, params: PhysicalParams, steady: SteadyState,
                     noise_model: str = "canonical") -> float:
    """c(omega) with [X_out(omega), Y_out(-omega)] = i c(omega) for every mode."""
    fr, fr_neg = build_drift(omega, params, steady), build_drift(-omega, params, steady)
    U_pos = unsymmetrized_output_correlations(omega, fr, fr_neg, params, noise_model)
    U_neg = unsymmetrized_output_correlations(-omega, fr_neg, fr, params, noise_model)
    with precise():
        return float(_commutator(U_pos, U_neg, params.mode_count))


def _assemble(omega: float, temperature: float, U_pos, U_neg, n: int, strict: bool) -> CovarianceMatrix:
    c = _commutator(U_pos, U_neg, n, strict=strict)
    G_sym = (U_pos + np.conjugate(U_pos.T) + U_neg + np.conjugate(U_neg.T)) / 4
    V_c = (G_sym + G_sym.T) / (2 * c)
    worst_imag = max(abs(v.imag) for v in V_c.flat)
    if worst_imag > IMAG_TOL:
        raise AssemblyError(f"covariance has imaginary residue {float(worst_imag):.3g} at omega={omega}")
    V = mp_array([[v.real for v in row] for row in V_c])
    cov = CovarianceMatrix(
        omega=float(omega),
        temperature=float(temperature),
        V=to_numpy(V, dtype=float),
        c_omega=float(c),
        precise=V,
    )
    if strict:
        check_block_structure(cov)
    return cov


def check_block_structure(cov: CovarianceMatrix, tol: float = BLOCK_TOL) -> None:
    """Equal diagonal blocks A and equal upper off-diagonal blocks C."""
    n = cov.mode_count
    if n < 2:
        return
    with precise():
        _check_blocks(cov, n, tol)


def _check_blocks(cov, n, tol):
    A, C = cov.blocks()
    for j in range(n):
        for k in range(j, n):
            ref = A if j == k else C
            diff = cov.block(j, k) - ref
            worst = max(abs(x) for x in diff.flat)
            if worst > tol:
                raise BlockStructureError(
                    f"block ({j + 1},{k + 1}) deviates from the symmetric structure by {float(worst):.3g}"
                )


def covariance(omega: float, params: PhysicalParams, steady: SteadyState | None = None,
               noise_model: str = "canonical", strict: bool = True) -> CovarianceMatrix:
    """Normalized symmetric covariance V(omega) of the output quadratures."""
    return covariances(omega, params, [params.temperature], steady, noise_model, strict)[0]


def covariances(omega: float, params: PhysicalParams, temperatures: Sequence[float],
                steady: SteadyState | None = None, noise_model: str = "canonical",
                strict: bool = True) -> list[CovarianceMatrix]:
    """V(omega) for several temperatures, sharing the temperature-independent
    response matrices."""
    steady = steady or model.steady_state_from_detuning(params)
    n = params.mode_count
    fr = build_drift(omega, params, steady)
    fr_neg = build_drift(-omega, params, steady)
    in_pos, force_pos = correlation_parts(fr, fr_neg, params)
    in_neg, force_neg = correlation_parts(fr_neg, fr, params)
    out = []
    for T in temperatures:
        p_T = params.with_(temperature=T)
        S_pos, S_neg = _force_psd(omega, p_T, noise_model), _force_psd(-omega, p_T, noise_model)
        with precise():
            U_pos = in_pos + force_pos * S_pos
            U_neg = in_neg + force_neg * S_neg
            out.append(_assemble(omega, T, U_pos, U_neg, n, strict))
    return out


def physicality_margin(cov: CovarianceMatrix) -> float:
    """Smallest eigenvalue of V + (i/2) Omega; nonnegative for a physical state."""
    ctx = MPContext()  # gmpy2 has no eigensolver; mpmath takes the exact entries
    ctx.dps = PRECISION
    n = cov.mode_count

    def exact(x):
        man, exp = x.as_mantissa_exp()
        return ctx.mpf((int(man), int(exp)))

    H = ctx.matrix([[exact(x) for x in row] for row in cov.precise])
    for j in range(n):
        H[2 * j, 2 * j + 1] += ctx.mpc(0, 0.5)
        H[2 * j + 1, 2 * j] -= ctx.mpc(0, 0.5)
    return float(min(ctx.eighe(H, eigvals_only=True)))
