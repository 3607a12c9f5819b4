from vemmhd.experiments.cases import (
    HARTMANN_PRESETS,
    HartmannCase,
    ManufacturedCase,
    ScalarField,
    VectorField,
    example1_case,
    example1_forcing,
    mhd_forcing,
)
from vemmhd.experiments.norms import compute_errors, interpolant_state, sample_field
from vemmhd.experiments.report import ErrorReport, LevelErrors, read_report, write_profile, write_report
from vemmhd.experiments.study import HartmannResult, convergence_study, run_hartmann, solve_case

__all__ = [
    "HARTMANN_PRESETS",
    "ErrorReport",
    "HartmannCase",
    "HartmannResult",
    "LevelErrors",
    "ManufacturedCase",
    "ScalarField",
    "VectorField",
    "compute_errors",
    "convergence_study",
    "example1_case",
    "example1_forcing",
    "interpolant_state",
    "mhd_forcing",
    "read_report",
    "run_hartmann",
    "sample_field",
    "solve_case",
    "write_profile",
    "write_report",
]
