"""Output-field entanglement and state-transfer fidelities of a cavity
with a radiation-pressure driven mirror."""

__version__ = "0.1.0"

from .model import PhysicalParams, SteadyState, steady_state_from_detuning, table_one
from .spectra import CovarianceMatrix, covariance, covariances
from .entanglement import EntanglementReport, evaluate
from .transfer import GaussianInput, TransferReport, teleclone_fidelity, teleport_fidelity

__all__ = [
    "PhysicalParams", "SteadyState", "steady_state_from_detuning", "table_one",
    "CovarianceMatrix", "covariance", "covariances",
    "EntanglementReport", "evaluate",
    "GaussianInput", "TransferReport", "teleclone_fidelity", "teleport_fidelity",
]
