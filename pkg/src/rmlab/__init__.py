"""Random-matrix laboratory.

Samplers for isotropic log-concave matrix ensembles, dense spectral
kernels, empirical measures with logarithmic potentials, and Monte Carlo
suites that check the circular law and its singular value scaffolding at
desk scale.
"""

__version__ = "0.1.0"

from .errors import DecompositionError, ParameterError
from .ensembles import (FAMILIES, CalibrationCache, EnsembleSpec,
                        IsotropyCalibration, calibrate_isotropy,
                        sample_exp_power, sample_lp_ball, sample_matrix,
                        tail_survival)
from .spectral import (ShiftSpec, SingularSpectrum, Spectrum, distance_to_span,
                       eigenvalues, hoffman_wielandt_gap, operator_norm,
                       real_embedding, shifted_matrix, shifted_singular_values,
                       smallest_singular_value)
from .measures import (EmpiricalMeasure, PotentialComparison,
                       circular_potential, disc_uniformity, esd,
                       log_potential_from_singulars, singular_esd, stieltjes,
                       uniform_integrability_stat)
from .experiments import (ExperimentConfig, ExperimentReport, compressibility,
                          run_circular_law, run_distance_subspace,
                          run_operator_norm, run_small_sv_counts,
                          run_smallest_sv, run_stieltjes_concentration,
                          run_tail_suite)

__all__ = [
    "CalibrationCache", "DecompositionError", "EmpiricalMeasure",
    "EnsembleSpec", "ExperimentConfig", "ExperimentReport", "FAMILIES",
    "IsotropyCalibration", "ParameterError", "PotentialComparison",
    "ShiftSpec", "SingularSpectrum",
    "Spectrum", "calibrate_isotropy", "circular_potential", "compressibility",
    "disc_uniformity", "distance_to_span", "eigenvalues", "esd",
    "hoffman_wielandt_gap", "log_potential_from_singulars", "operator_norm",
    "real_embedding", "run_circular_law", "run_distance_subspace",
    "run_operator_norm", "run_small_sv_counts", "run_smallest_sv",
    "run_stieltjes_concentration", "run_tail_suite", "sample_exp_power",
    "sample_lp_ball", "sample_matrix", "shifted_matrix",
    "shifted_singular_values", "singular_esd", "smallest_singular_value",
    "stieltjes", "tail_survival", "uniform_integrability_stat",
]
