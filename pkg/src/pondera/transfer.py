"""Teleportation and telecloning fidelities of Gaussian states over the
output-field channel.

Fidelities use the closed form 1/sqrt(det(2D + R A R + R C + C^T R + A))
of the unit-gain protocol; :func:`fidelity_quadrature_oracle` integrates the
underlying two-dimensional Gaussian directly and is meant for checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import blocks as b
from .errors import BlockStructureError, UnphysicalChannelError
from .spectra import CovarianceMatrix, check_block_structure, precise

CLASSICAL_BOUND = 0.5
CLONING_BOUND = 2.0 / 3.0


@dataclass(frozen=True)
class GaussianInput:
    """Correlation matrix D of the state to be transferred."""

    D: np.ndarray = field(default_factory=lambda: np.diag([0.5, 0.5]))

    def __post_init__(self):
        D = np.asarray(self.D, dtype=float)
        if D.shape != (2, 2) or not np.allclose(D, D.T, rtol=0, atol=1e-12):
            raise ValueError(f"D must be a symmetric 2x2 matrix, got {D.tolist()}")
        if D[0, 0] <= 0 or np.linalg.det(D) <= 0:
            raise ValueError(f"D must be positive definite, got {D.tolist()}")
        object.__setattr__(self, "D", D)

    @classmethod
    def coherent(cls) -> GaussianInput:
        return cls(np.diag([0.5, 0.5]))


def _fidelity_matrix(A, C, D):
    A, C, D = b.as_block(A), b.as_block(C), b.as_block(D)
    return b.add(b.scale(2, D), b.mm(b.mm(b.R, A), b.R), b.mm(b.R, C), b.mm(b.T(C), b.R), A)


def teleport_fidelity(A, C, D=None) -> float:
    """Unit-gain teleportation fidelity of input D through the two-mode
    channel with blocks (A, C)."""
    D = GaussianInput.coherent().D if D is None else GaussianInput(D).D
    with precise():
        Mf = _fidelity_matrix(A, C, D)
        det = b.det(Mf)
        if not (Mf[0][0] > 0 and det > 0):
            raise UnphysicalChannelError(f"fidelity form is not positive definite (det = {float(det):.3g})")
        return float(1 / det ** 0.5)


def teleclone_fidelity(V3, D=None) -> float:
    """1 -> 2 telecloning fidelity at either receiver of a symmetric
    three-mode channel.

    Only the sender block and the sender/receiver cross block enter; both
    receiver choices are checked to give the same blocks.
    """
    if isinstance(V3, CovarianceMatrix):
        if V3.mode_count != 3:
            raise BlockStructureError(f"expected three modes, got {V3.mode_count}")
        check_block_structure(V3)
        A, C = V3.block(0, 0), V3.block(0, 1)
    else:
        V = np.asarray(V3, dtype=float)
        if V.shape != (6, 6):
            raise BlockStructureError(f"expected a 6x6 matrix, got {V.shape}")
        A, C = V[0:2, 0:2], V[0:2, 2:4]
        if np.abs(V[0:2, 4:6] - C).max() > 1e-9 or np.abs(V[4:6, 4:6] - V[2:4, 2:4]).max() > 1e-9:
            raise BlockStructureError("receivers are not symmetric; telecloning pair choice is ambiguous")
    return teleport_fidelity(A, C, D)


def fidelity_quadrature_oracle(A, C, D=None, nodes: int = 96, radius: float = 8.0,
                               tol: float = 1e-9) -> float:
    """Fidelity by direct numerical integration of

        (1/4 pi) int d^2 l exp(-l D l / 2) exp(-u V u / 4),  u = (l1, -l2, l1, l2),

    with V = [[A, C], [C^T, A]]. Tensor Gauss-Legendre: the outer window is
    ``radius`` marginal standard deviations of l1, the inner window follows the
    conditional mean of l2. The result is recomputed with doubled window and
    nodes; disagreement above ``tol`` raises ArithmeticError.
    """
    D = GaussianInput.coherent().D if D is None else GaussianInput(D).D
    A = np.array(b.as_block(A), dtype=float)
    C = np.array(b.as_block(C), dtype=float)
    V = np.block([[A, C], [C.T, A]])

    def exponent(l1, l2):
        u = np.stack([l1, -l2, l1, l2])
        lam = np.stack([l1, l2])
        quad_v = np.einsum("i...,ij,j...->...", u, V, u)
        quad_d = np.einsum("i...,ij,j...->...", lam, D, lam)
        return -0.5 * quad_d - 0.25 * quad_v

    # Hessian of the exponent by polarization, for window placement only
    e = {(0, 0): exponent(np.array(1.0), np.array(0.0)), (1, 1): exponent(np.array(0.0), np.array(1.0))}
    both = exponent(np.array(1.0), np.array(1.0))
    Q = -np.array([[2 * e[0, 0], both - e[0, 0] - e[1, 1]],
                   [both - e[0, 0] - e[1, 1], 2 * e[1, 1]]])
    if not (Q[0, 0] > 0 and Q[1, 1] > 0 and np.linalg.eigvalsh(Q).min() > 0):
        raise ArithmeticError("integrand is not a decaying Gaussian; the integral diverges")
    marginal_sd = math.sqrt(Q[1, 1] / (Q[0, 0] * Q[1, 1] - Q[0, 1] ** 2))
    cond_sd = 1 / math.sqrt(Q[1, 1])

    def integrate(n, r):
        x, w = np.polynomial.legendre.leggauss(n)
        l1 = r * marginal_sd * x
        w1 = r * marginal_sd * w
        centre = -Q[0, 1] / Q[1, 1] * l1
        l2 = centre[:, None] + r * cond_sd * x[None, :]
        w2 = r * cond_sd * w[None, :]
        vals = np.exp(exponent(np.broadcast_to(l1[:, None], l2.shape), l2))
        return float((w1[:, None] * w2 * vals).sum() / (4 * math.pi))

    coarse = integrate(nodes, radius)
    fine = integrate(2 * nodes, 2 * radius)
    if abs(fine - coarse) > tol:
        raise ArithmeticError(f"quadrature not converged: {coarse!r} vs {fine!r}")
    return fine


@dataclass(frozen=True)
class TransferReport:
    omega: float
    F_tele: float | None = None
    F_clone: float | None = None
    classical_bound: float = CLASSICAL_BOUND
    cloning_bound: float = CLONING_BOUND

    @property
    def beats_classical_tele(self) -> bool | None:
        return None if self.F_tele is None else self.F_tele > self.classical_bound

    @property
    def beats_classical_clone(self) -> bool | None:
        return None if self.F_clone is None else self.F_clone > self.classical_bound

    @property
    def within_cloning_bound(self) -> bool | None:
        return None if self.F_clone is None else self.F_clone <= self.cloning_bound + 1e-9
