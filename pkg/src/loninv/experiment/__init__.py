"""Simulated two-photon experiment: preparation, evolution, detection, analysis."""

from .detection import (
    CountRecord,
    MeasurementSetting,
    exact_probabilities,
    povm_rank,
    simulate_counts,
    tomography_settings,
)
from .direct import DirectMeasurement, direct_measure_itprime
from .hom import DipModel, fit_hom_dip, hom_dip
from .preparation import PreparedState, paper_state_table, prepare_state_hom, prepare_state_hom_oracle
from .tomography import TomographyResult, fidelity, reconstruct_ls

__all__ = [
    "CountRecord",
    "MeasurementSetting",
    "exact_probabilities",
    "povm_rank",
    "simulate_counts",
    "tomography_settings",
    "DirectMeasurement",
    "direct_measure_itprime",
    "DipModel",
    "fit_hom_dip",
    "hom_dip",
    "PreparedState",
    "paper_state_table",
    "prepare_state_hom",
    "prepare_state_hom_oracle",
    "TomographyResult",
    "fidelity",
    "reconstruct_ls",
]
