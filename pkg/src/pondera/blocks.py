"""2x2 block arithmetic that works on floats and on multiple-precision
numbers alike.

Marker and fidelity formulas cancel large entries against each other, so
they are written against nested lists of scalars and evaluated in whatever
precision the caller's blocks carry.
"""

from __future__ import annotations

import numpy as np

from .errors import BlockStructureError


def as_block(M) -> list[list]:
    """Nested 2x2 list from a numpy array (object arrays keep their multiple-precision
    entries), nested sequence or mpmath matrix."""
    if hasattr(M, "tolist") and not (isinstance(M, np.ndarray) and M.dtype != object):
        rows = M.tolist()
        if len(rows) == 2 and len(rows[0]) == 2:
            return [[rows[0][0], rows[0][1]], [rows[1][0], rows[1][1]]]
    arr = np.asarray(M, dtype=float)
    if arr.shape != (2, 2):
        raise BlockStructureError(f"expected a 2x2 block, got shape {arr.shape}")
    return [[float(arr[0, 0]), float(arr[0, 1])], [float(arr[1, 0]), float(arr[1, 1])]]


def mm(X, Y):
    return [[X[0][0] * Y[0][0] + X[0][1] * Y[1][0], X[0][0] * Y[0][1] + X[0][1] * Y[1][1]],
            [X[1][0] * Y[0][0] + X[1][1] * Y[1][0], X[1][0] * Y[0][1] + X[1][1] * Y[1][1]]]


def add(*Xs):
    return [[sum(X[i][j] for X in Xs) for j in range(2)] for i in range(2)]


def scale(a, X):
    return [[a * X[0][0], a * X[0][1]], [a * X[1][0], a * X[1][1]]]


def T(X):
    return [[X[0][0], X[1][0]], [X[0][1], X[1][1]]]


def det(X):
    return X[0][0] * X[1][1] - X[0][1] * X[1][0]


def trace(X):
    return X[0][0] + X[1][1]


def check_symmetric(X, tol: float = 1e-9, name: str = "A") -> None:
    if abs(X[0][1] - X[1][0]) > tol:
        raise BlockStructureError(f"{name} is not symmetric: off-diagonal entries differ by {float(abs(X[0][1] - X[1][0])):.3g}")


J = [[0.0, 1.0], [-1.0, 0.0]]
R = [[1.0, 0.0], [0.0, -1.0]]
