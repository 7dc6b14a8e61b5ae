"""Frequency/temperature sweeps and their CSV output."""

from __future__ import annotations

import csv
import io
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

from . import __version__, entanglement, model, spectra, transfer
from .config import SweepConfig
from .errors import PonderaError

NA = "NA"


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    columns: tuple[str, ...]
    rows: list[dict]
    stability_margin: float

    @property
    def error_count(self) -> int:
        return sum(1 for r in self.rows if r.get("error"))


def columns(config: SweepConfig) -> tuple[str, ...]:
    cols = ["omega", "omega_over_omega_m", "T", "c_omega", "min_eig"]
    cols += [f"E_{name}" for name in config.criteria]
    if config.params.mode_count == 3 and config.criteria:
        cols.append("tripartite_inseparable")
    if "teleport" in config.transfer:
        cols += ["F_tele", "tele_beats_classical"]
    if "teleclone" in config.transfer:
        cols += ["F_clone", "clone_beats_classical", "clone_within_bound"]
    cols.append("error")
    return tuple(cols)


def _error_text(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}".replace("\n", " ")


def _row(config: SweepConfig, omega: float, T: float, cov=None, error: str | None = None) -> dict:
    row = {"omega": float(omega), "omega_over_omega_m": float(omega) / config.params.omega_m, "T": float(T)}
    if cov is not None:
        try:
            row["c_omega"] = cov.c_omega
            row["min_eig"] = spectra.physicality_margin(cov)
            if config.criteria:
                report = entanglement.evaluate(cov, config.criteria)
                for name in config.criteria:
                    row[f"E_{name}"] = getattr(report, f"E_{name}")
                if report.tripartite_fully_inseparable is not None:
                    row["tripartite_inseparable"] = report.tripartite_fully_inseparable
            A, C = cov.blocks(precise=True)
            if "teleport" in config.transfer:
                F = transfer.teleport_fidelity(A, C, config.D)
                row.update(F_tele=F, tele_beats_classical=F > transfer.CLASSICAL_BOUND)
            if "teleclone" in config.transfer:
                F = transfer.teleclone_fidelity(cov, config.D)
                row.update(F_clone=F, clone_beats_classical=F > transfer.CLASSICAL_BOUND,
                           clone_within_bound=F <= transfer.CLONING_BOUND + 1e-9)
        except (PonderaError, ArithmeticError, ValueError) as exc:
            row = {k: row[k] for k in ("omega", "omega_over_omega_m", "T")}
            error = _error_text(exc)
    row["error"] = error
    return row


def evaluate_point(config: SweepConfig, omega: float, steady: model.SteadyState | None = None) -> list[dict]:
    """All output rows at one frequency, in temperature order."""
    params = config.params
    steady = steady or model.steady_state_from_detuning(params)
    try:
        covs = spectra.covariances(omega, params, config.temperatures, steady, config.noise_model)
        return [_row(config, omega, T, cov) for T, cov in zip(config.temperatures, covs)]
    except (PonderaError, ArithmeticError):
        pass
    rows = []
    for T in config.temperatures:  # isolate the failing temperature
        try:
            cov = spectra.covariance(omega, params.with_(temperature=T), steady, config.noise_model)
            rows.append(_row(config, omega, T, cov))
        except (PonderaError, ArithmeticError) as exc:
            rows.append(_row(config, omega, T, error=_error_text(exc)))
    return rows


def run_sweep(config: SweepConfig, workers: int = 1) -> SweepResult:
    """Rows ordered by frequency, then temperature; identical for any worker count."""
    steady = model.steady_state_from_detuning(config.params)
    grid = [float(w) for w in config.omega_grid()]
    task = partial(evaluate_point, config, steady=steady)
    if workers > 1 and len(grid) > 1:
        chunk = max(1, len(grid) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_point = list(pool.map(task, grid, chunksize=chunk))
    else:
        per_point = [task(w) for w in grid]
    rows = [row for point in per_point for row in point]
    return SweepResult(config, columns(config), rows, model.stability_margin(config.params, steady))


def _cell(value) -> str:
    if value is None:
        return NA
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(result: SweepResult) -> str:
    buf = io.StringIO(newline="")
    for key, value in result.config.echo():
        buf.write(f"# {key} = {value}\r\n")
    buf.write(f"# stability_margin = {result.stability_margin!r}\r\n")
    buf.write(f"# pondera_version = {__version__}\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([_cell(row.get(col)) if col != "error" else (row.get("error") or "")
                         for col in result.columns])
    return buf.getvalue()


def emit_csv(result: SweepResult, destination) -> None:
    """Write the CSV to a path (atomically, via a temporary file and rename),
    to ``"-"`` for stdout, or to an open text stream."""
    text = render_csv(result)
    if destination == "-" or destination is None:
        sys.stdout.write(text)
        return
    if hasattr(destination, "write"):
        destination.write(text)
        return
    path = os.fspath(destination)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".pondera-", suffix=".csv.tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
