"""Acceptance suite: one recorded PASS/FAIL line per criterion (see the
terminal summary), each checked at its stated tolerance."""

import time
from functools import lru_cache

import numpy as np
import pytest

from acceptance_log import record
from pondera import entanglement, model, spectra, transfer
from pondera.config import PRESETS, parse_config
from pondera.sweep import render_csv, run_sweep

MONOTONE_SLACK = 1e-12


@lru_cache(maxsize=None)
def sweep(text, workers=1):
    start = time.perf_counter()
    result = run_sweep(parse_config(text), workers=workers)
    return result, time.perf_counter() - start


def preset(name):
    return sweep(f"preset = {name}")


def by_temperature(result):
    """{T: (omega/omega_m array, rows)} in grid order."""
    out = {}
    for T in result.config.temperatures:
        rows = [r for r in result.rows if r["T"] == T]
        out[T] = (np.array([r["omega_over_omega_m"] for r in rows]), rows)
    return out


def column(rows, key):
    return np.array([r[key] for r in rows], dtype=float)


def bands(below):
    """(first, last) index of every run of consecutive True entries."""
    runs, start = [], None
    for i, flag in enumerate(below):
        if flag and start is None:
            start = i
        if not flag and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(below) - 1))
    return runs


def nondecreasing_violation(series):
    """Largest drop between consecutive temperatures, relative to max(1, |E|)."""
    worst = 0.0
    for lo, hi in zip(series, series[1:]):
        worst = max(worst, float(np.max((lo - hi) / np.maximum(1.0, np.abs(lo)))))
    return worst


# --- 1 -------------------------------------------------------------------------

def test_c1_vacuum_identities():
    rng = np.random.default_rng(1)
    cases = [(rng.uniform(0, 2), rng.uniform(0, 300), rng.uniform(-0.5, 0.5)) for _ in range(100)]
    worst_V = worst_E = worst_F = 0.0
    start = time.perf_counter()
    for x, T, detuning in cases:
        p = model.table_one(detuning=detuning, temperature=T, mode_count=3).with_(input_power=0.0)
        cov = spectra.covariance(x * p.omega_m, p)
        A, C = cov.blocks()
        worst_V = max(worst_V, np.abs(cov.V - 0.5 * np.eye(6)).max())
        worst_E = max(worst_E, *(abs(f(A, C) - 1) for f in entanglement.MARKERS.values()))
        worst_F = max(worst_F, abs(transfer.teleport_fidelity(A, C) - 0.5),
                      abs(transfer.teleclone_fidelity(cov) - 0.5))
    elapsed = time.perf_counter() - start
    ok = worst_V <= 1e-9 and worst_E <= 1e-9 and worst_F <= 1e-12 and elapsed < 1.0
    record("C1 vacuum identities", ok,
           f"|V-I/2| {worst_V:.2g}, |E-1| {worst_E:.2g}, |F-1/2| {worst_F:.2g}, {elapsed:.2f} s")
    assert ok


# --- 2 -------------------------------------------------------------------------

def test_c2_fidelity_oracle():
    rng = np.random.default_rng(2)
    channels = []
    for name in ("fig3", "fig4"):
        cfg = parse_config(f"preset = {name}")
        grid = cfg.omega_grid()
        for i in rng.choice(len(grid), size=10, replace=False):
            T = float(rng.choice(cfg.temperatures))
            cov = spectra.covariance(grid[i], cfg.params.with_(temperature=T))
            channels.append((*cov.blocks(), 0.5 * np.eye(2)))
    for _ in range(5):
        a, d = rng.uniform(0.6, 4, size=2)
        A = np.array([[a, 0.1 * a], [0.1 * a, a]])
        C = np.diag([-0.4, 0.4]) * (a - 0.5) + 0.05
        s = rng.uniform(0.3, 3)
        D = np.array([[s, 0.05], [0.05, (1 + 0.05**2) / s]])
        channels.append((A, C, D))
    start = time.perf_counter()
    worst = max(abs(transfer.teleport_fidelity(A, C, D) - transfer.fidelity_quadrature_oracle(A, C, D))
                for A, C, D in channels)
    elapsed = time.perf_counter() - start
    ok = worst < 1e-6 and elapsed < 30
    record("C2 fidelity oracle", ok, f"{len(channels)} channels, max |dF| {worst:.2g}, {elapsed:.2f} s")
    assert ok


# --- 3 -------------------------------------------------------------------------

@pytest.mark.parametrize("name", PRESETS)
def test_c3_physicality(name):
    result, elapsed = preset(name)
    margins = [r.get("min_eig") for r in result.rows]
    missing = sum(m is None for m in margins)
    low = min(m for m in margins if m is not None)
    ok = missing == 0 and low >= -1e-9 and elapsed < 60
    record(f"C3 physicality {name}", ok,
           f"{len(result.rows)} rows, min eigenvalue {low:.3g}, {missing} errored, {elapsed:.1f} s")
    assert ok


# --- 4 -------------------------------------------------------------------------

def test_c4_zero_detuning_hierarchy():
    result, _ = preset("fig2")
    table = by_temperature(result)
    x, rows = table[0.0]
    inside = x > 0
    simon = column(rows, "E_simon")[inside]
    product = column(rows, "E_product")[inside]
    total = column(rows, "E_sum")[inside]
    verdicts = {T: [r.get("E_simon") < 1 for r in rs] + [r.get("E_product") < 1 for r in rs]
                + [r.get("E_sum") < 1 for r in rs] for T, (_, rs) in table.items()}
    flips = sum(a != b for a, b in zip(verdicts[0.0], verdicts[300.0]))
    ok = simon.min() < 1 and product.min() >= 1 - 1e-6 and total.min() >= 1 - 1e-6 and flips == 0
    record("C4 zero detuning", ok,
           f"min E_simon {simon.min():.4g}, min E_product {product.min():.12g}, "
           f"min E_sum {total.min():.12g}, verdict changes 0 K vs 300 K: {flips}")
    assert ok


# --- 5 -------------------------------------------------------------------------

C5_SWEEPS = {+0.1: "preset = fig4", -0.1: "preset = fig3\ntemperatures = 0, 10, 50, 100"}
LOW_FREQUENCY = 0.5  # omega/omega_m at or below which a band counts as low-frequency


def _c5_bands(detuning):
    result, _ = sweep(C5_SWEEPS[detuning])
    x, rows = by_temperature(result)[0.0]
    E = column(rows, "E_sum")
    return x, E, bands(E < 1)


def _describe(x, runs):
    return ", ".join(f"[{x[a]:.4f}, {x[b]:.4f}]" for a, b in runs) or "none"


@pytest.mark.parametrize("detuning", [+0.1, -0.1])
def test_c5_low_frequency_band(detuning):
    x, E, runs = _c5_bands(detuning)
    ok = any(x[a] <= LOW_FREQUENCY for a, _ in runs)
    record(f"C5 detuning {detuning:+} low-frequency band at T=0", ok,
           f"E_sum < 1 on {_describe(x, runs)}; E_sum(0) = {E[0]:.4g}, E_sum(0.5) ~ {E[np.argmin(abs(x - 0.5))]:.4g}")
    assert ok


@pytest.mark.parametrize("detuning", [+0.1, -0.1])
def test_c5_resonance_band(detuning):
    x, E, runs = _c5_bands(detuning)
    h = x[1] - x[0]
    ok = any(x[a] - h <= 1 <= x[b] + h for a, b in runs)
    record(f"C5 detuning {detuning:+} band containing omega_m at T=0", ok,
           f"E_sum < 1 on {_describe(x, runs)}, grid spacing {h:.4g}")
    assert ok


@pytest.mark.parametrize("detuning", [+0.1, -0.1])
def test_c5_temperature_ordering(detuning):
    result, _ = sweep(C5_SWEEPS[detuning])
    table = by_temperature(result)
    series = [column(table[T][1], "E_sum") for T in (0.0, 10.0, 50.0, 100.0)]
    drop = nondecreasing_violation(series)
    at10 = series[1].min()
    ok = drop <= MONOTONE_SLACK and at10 < 1 and result.error_count == 0
    record(f"C5 detuning {detuning:+} thermal ordering", ok,
           f"largest relative drop with T {drop:.2g}, min E_sum at 10 K {at10:.4f}")
    assert ok


# --- 6 -------------------------------------------------------------------------

def test_c6_transfer_fidelities():
    tele, _ = preset("fig5")
    clone, _ = preset("fig6")
    tt, ct = by_temperature(tele), by_temperature(clone)
    at_min = {}
    for T in (0.0, 10.0):
        rows = tt[T][1]
        i = int(np.argmin(column(rows, "E_sum")))
        at_min[T] = (rows[i]["omega_over_omega_m"], rows[i]["F_tele"])
    temps = tele.config.temperatures
    drop_tele = nondecreasing_violation([-column(tt[T][1], "F_tele") for T in temps])
    drop_clone = nondecreasing_violation([-column(ct[T][1], "F_clone") for T in temps])
    f_clone = max(r["F_clone"] for r in clone.rows)
    ok = (all(F > 0.5 for _, F in at_min.values()) and drop_tele <= MONOTONE_SLACK
          and drop_clone <= MONOTONE_SLACK and f_clone <= transfer.CLONING_BOUND + 1e-9)
    record("C6 transfer fidelities", ok,
           "F_tele at min E_sum: " + ", ".join(f"{T:g} K {F:.4f} (omega {x:.3f})" for T, (x, F) in at_min.items())
           + f"; max F_clone {f_clone:.4f}; rises with T: tele {drop_tele:.2g}, clone {drop_clone:.2g}")
    assert ok


# --- 7 -------------------------------------------------------------------------

def _per_mode_commutators(omega, params):
    steady = model.steady_state_from_detuning(params)
    fr, fr_neg = spectra.build_drift(omega, params, steady), spectra.build_drift(-omega, params, steady)
    U_pos = spectra.to_numpy(spectra.unsymmetrized_output_correlations(omega, fr, fr_neg, params, "canonical"))
    U_neg = spectra.to_numpy(spectra.unsymmetrized_output_correlations(-omega, fr_neg, fr, params, "canonical"))
    lam = (U_pos - U_neg.T + U_neg - U_pos.T) / 2
    return np.array([lam[2 * j, 2 * j + 1] / 1j for j in range(params.mode_count)])


@pytest.mark.parametrize("name", PRESETS)
def test_c7_commutator_consistency(name):
    result, _ = preset(name)
    c = column(result.rows, "c_omega")
    ok_positive = result.error_count == 0 and bool(np.all(c > 0))
    per_omega = c.reshape(-1, len(result.config.temperatures))  # rows are frequency-major
    spread = float(np.max((per_omega.max(axis=1) - per_omega.min(axis=1)) / per_omega.max(axis=1)))
    cfg = result.config
    mode_spread = 0.0
    for w in cfg.omega_grid()[::50]:
        per_mode = _per_mode_commutators(w, cfg.params)
        mode_spread = max(mode_spread, float(np.abs(per_mode - per_mode[0]).max() / abs(per_mode[0])))
    ok = ok_positive and spread <= 1e-9 and mode_spread <= 1e-9
    record(f"C7 commutator {name}", ok,
           f"min c {c.min():.6g}, relative T spread {spread:.2g}, mode spread {mode_spread:.2g}")
    assert ok


# --- 8 -------------------------------------------------------------------------

def test_c8_fidelity_sum_identity():
    worst = 0.0
    for a in np.linspace(0.5, 5, 20):
        for c in np.linspace(0, a - 0.01, 20):
            A, C = a * np.eye(2), np.diag([-c, c])
            F = transfer.teleport_fidelity(A, C, 0.5 * np.eye(2))
            worst = max(worst, abs(F - 1 / (1 + entanglement.sum_marker(A, C))))
    ok = worst <= 1e-12
    record("C8 fidelity identity", ok, f"400 channels, max deviation {worst:.2g}")
    assert ok


# --- 9 -------------------------------------------------------------------------

def test_c9_bistability():
    rng = np.random.default_rng(9)
    worst, counts = 0.0, {}
    for _ in range(50):
        base = model.table_one()
        p = base.with_(input_power=10 ** rng.uniform(-4, 1), gamma_c=base.gamma_c * 10 ** rng.uniform(-1, 1),
                       mass=base.mass * 10 ** rng.uniform(-2, 2))
        bare = rng.uniform(-30, 30) * p.gamma_c
        branches = model.solve_bistability(p, bare)
        counts[len(branches)] = counts.get(len(branches), 0) + 1
        for branch in branches:
            worst = max(worst, model.bistability_residual(p, bare, branch.alpha_sq))
    ok = worst < 1e-9 and set(counts) <= {1, 3}
    record("C9 bistability", ok, f"max relative residual {worst:.2g}, branch counts {dict(sorted(counts.items()))}")
    assert ok


# --- 10 ------------------------------------------------------------------------

def test_c10_determinism():
    serial, _ = preset("fig4")
    parallel, elapsed = sweep("preset = fig4", workers=8)
    same = render_csv(serial) == render_csv(parallel)
    record("C10 determinism", same, f"fig4 with 1 and 8 workers byte-identical: {same} ({elapsed:.1f} s parallel)")
    assert same

