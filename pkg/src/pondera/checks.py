"""Built-in invariant suite run by ``pondera check``."""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from . import entanglement, model, spectra, transfer


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def _vacuum(rng) -> str:
    worst = 0.0
    for _ in range(10):
        p = model.table_one(detuning=rng.uniform(-0.5, 0.5), temperature=rng.uniform(0, 300)).with_(input_power=0.0)
        cov = spectra.covariance(rng.uniform(0.01, 2) * p.omega_m, p)
        A, C = cov.blocks()
        worst = max(worst, np.abs(cov.V - 0.5 * np.eye(4)).max(),
                    *(abs(f(A, C) - 1) for f in entanglement.MARKERS.values()),
                    abs(transfer.teleport_fidelity(A, C) - 0.5))
    assert worst < 1e-9, f"deviation {worst:.3g}"
    return f"max deviation {worst:.3g}"


def _commutator(rng) -> str:
    worst = 0.0
    for detuning in (-0.1, 0.0, 0.1):
        p = model.table_one(detuning=detuning)
        for x in (0.3, 0.99, 1.05):
            covs = spectra.covariances(x * p.omega_m, p, [0.0, 100.0])
            worst = max(worst, *(abs(c.c_omega - 1) for c in covs))
    assert worst < 1e-9, f"c deviates from 1 by {worst:.3g}"
    return f"max |c - 1| {worst:.3g}"


def _physicality(rng) -> str:
    low = np.inf
    for detuning in (-0.1, 0.0, 0.1):
        p = model.table_one(detuning=detuning)
        for x in (0.05, 0.5, 1.0, 1.5):
            for cov in spectra.covariances(x * p.omega_m, p, [0.0, 50.0]):
                low = min(low, spectra.physicality_margin(cov))
    assert low >= -1e-9, f"min eigenvalue {low:.3g}"
    return f"min eigenvalue {low:.3g}"


def _oracle(rng) -> str:
    worst = 0.0
    p = model.table_one(detuning=0.1)
    for x in (0.1, 0.9, 1.2):
        cov = spectra.covariance(x * p.omega_m, p)
        A, C = cov.blocks(precise=False)
        worst = max(worst, abs(transfer.teleport_fidelity(*cov.blocks()) - transfer.fidelity_quadrature_oracle(A, C)))
    for _ in range(3):
        a = rng.uniform(0.5, 3)
        c = rng.uniform(0, a - 0.1)
        A, C = a * np.eye(2), np.diag([-c, c])
        worst = max(worst, abs(transfer.teleport_fidelity(A, C) - transfer.fidelity_quadrature_oracle(A, C)))
    assert worst < 1e-6, f"oracle disagreement {worst:.3g}"
    return f"max disagreement {worst:.3g}"


def _identity(rng) -> str:
    worst = 0.0
    for _ in range(50):
        a = rng.uniform(0.5, 5)
        c = rng.uniform(0, a - 0.01)
        A, C = a * np.eye(2), np.diag([-c, c])
        worst = max(worst, abs(transfer.teleport_fidelity(A, C) - 1 / (1 + entanglement.sum_marker(A, C))))
    assert worst < 1e-12, f"deviation {worst:.3g}"
    return f"max deviation {worst:.3g}"


def _bistability(rng) -> str:
    worst = 0.0
    for _ in range(20):
        p = model.table_one().with_(input_power=10 ** rng.uniform(-4, 0))
        bare = rng.uniform(-20, 20) * p.gamma_c
        for branch in model.solve_bistability(p, bare):
            worst = max(worst, model.bistability_residual(p, bare, branch.alpha_sq))
    assert worst < 1e-9, f"residual {worst:.3g}"
    return f"max residual {worst:.3g}"


CHECKS: dict[str, Callable] = {
    "vacuum identities": _vacuum,
    "commutator scale": _commutator,
    "physicality": _physicality,
    "fidelity oracle": _oracle,
    "fidelity/sum-marker identity": _identity,
    "bistability residuals": _bistability,
}


def run_checks(seed: int = 2024) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results = []
    for name, check in CHECKS.items():
        try:
            results.append(CheckResult(name, True, check(rng)))
        except Exception as exc:  # report every check, including crashes
            results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
    return results
