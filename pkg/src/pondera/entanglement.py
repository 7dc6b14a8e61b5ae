"""Bipartite entanglement markers and the symmetric tripartite verdict.

Every marker equals 1 on the vacuum and signals entanglement below 1.
The markers take the diagonal block A (both modes share it) and the
cross block C of a two-mode covariance matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import blocks as b
from .errors import BlockStructureError
from .spectra import CovarianceMatrix, check_block_structure, precise

THRESHOLD = 1.0
CRITERIA = ("simon", "product", "sum")


def simon_marker(A, C) -> float:
    """1 + (det A)^2 + (1/4 - |det C|)^2 - tr(A J C J A J C^T J) - det(A)/2."""
    A, C = b.as_block(A), b.as_block(C)
    with precise():
        b.check_symmetric(A)
        dA = b.det(A)
        chain = b.mm(b.mm(b.mm(b.mm(b.mm(b.mm(b.mm(A, b.J), C), b.J), A), b.J), b.T(C)), b.J)
        E = 1 + dA * dA + (0.25 - abs(b.det(C))) ** 2 - b.trace(chain) - dA / 2
        return _finite(E, "simon")


def product_marker(A, C) -> float:
    """4 (A11 + C11)(A22 - C22)."""
    A, C = b.as_block(A), b.as_block(C)
    with precise():
        b.check_symmetric(A)
        return _finite(4 * (A[0][0] + C[0][0]) * (A[1][1] - C[1][1]), "product")


def sum_marker(A, C) -> float:
    """tr A + tr(C R) with R = diag(1, -1)."""
    A, C = b.as_block(A), b.as_block(C)
    with precise():
        b.check_symmetric(A)
        return _finite(b.trace(A) + C[0][0] - C[1][1], "sum")


MARKERS = {"simon": simon_marker, "product": product_marker, "sum": sum_marker}


def _finite(value, name: str) -> float:
    out = float(value)
    if not math.isfinite(out):
        raise ArithmeticError(f"{name} marker is not finite")
    return out


@dataclass(frozen=True)
class EntanglementReport:
    omega: float
    E_simon: float
    E_product: float
    E_sum: float
    tripartite_fully_inseparable: bool | None = None

    @property
    def entangled_simon(self) -> bool:
        return self.E_simon < THRESHOLD

    @property
    def entangled_product(self) -> bool:
        return self.E_product < THRESHOLD

    @property
    def entangled_sum(self) -> bool:
        return self.E_sum < THRESHOLD

    def verdicts(self) -> tuple[bool, bool, bool]:
        return self.entangled_simon, self.entangled_product, self.entangled_sum


def tripartite_verdict(V3, criteria: Iterable[str] = ("sum",)) -> bool:
    """Full inseparability of a permutation-symmetric three-mode state.

    By symmetry, entanglement of one pair (certified by any of ``criteria``)
    holds for every pair and every grouping. Refuses inputs without the
    symmetric block structure.
    """
    if isinstance(V3, CovarianceMatrix):
        if V3.mode_count != 3:
            raise BlockStructureError(f"expected three modes, got {V3.mode_count}")
        check_block_structure(V3)
        A, C = V3.blocks()
    else:
        V = np.asarray(V3, dtype=float)
        if V.shape != (6, 6):
            raise BlockStructureError(f"expected a 6x6 matrix, got {V.shape}")
        A, C = V[0:2, 0:2], V[0:2, 2:4]
        for j, k in [(1, 1), (2, 2)]:
            if np.abs(V[2 * j:2 * j + 2, 2 * k:2 * k + 2] - A).max() > 1e-9:
                raise BlockStructureError(f"diagonal block ({j + 1},{k + 1}) differs from A")
        for j, k in [(0, 2), (1, 2)]:
            if np.abs(V[2 * j:2 * j + 2, 2 * k:2 * k + 2] - C).max() > 1e-9:
                raise BlockStructureError(f"off-diagonal block ({j + 1},{k + 1}) differs from C")
    return any(MARKERS[name](A, C) < THRESHOLD for name in criteria)


def evaluate(cov: CovarianceMatrix, tripartite_criteria: Iterable[str] = ("sum",)) -> EntanglementReport:
    """All three bipartite markers of modes 1 and 2, plus the tripartite
    verdict for three-mode states."""
    A, C = cov.blocks(precise=True)
    tri = tripartite_verdict(cov, tripartite_criteria) if cov.mode_count == 3 else None
    return EntanglementReport(
        omega=cov.omega,
        E_simon=simon_marker(A, C),
        E_product=product_marker(A, C),
        E_sum=sum_marker(A, C),
        tripartite_fully_inseparable=tri,
    )
