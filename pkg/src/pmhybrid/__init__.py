"""Nonreciprocal photon-magnon hybrid circuit modeling.

A transmission-line circuit loaded by a resonator/magnon hybrid cell,
effective-medium extraction of n/eps/mu, the coupled-mode eigenvalue model
with complex coupling, zero-damping (anti-damping) windows, NRI region
analysis, and parameter fitting. Conventions: e^{+i omega t} time
dependence, complex frequencies omega - i*delta_omega, loss-positive
n = n' - i n''.
"""

from .analysis import (AblationResult, ContainmentReport, DisjointnessReport,
                       FieldFrequencyMap, GridSpec, NriRegion, SweepResult,
                       antidamping_window_for, build_maps, correlate_antidamping,
                       coupling_sweep, detect_nri_regions, direction_disjointness,
                       dominant_region, im_coupling_ablation, region_is_present)
from .circuit_model import (CellImmittance, CircuitParams, MaterialPoint,
                            YigInductanceParams, bloch_phase, calibrated_params,
                            default_params, l_yig, material_from_circuit,
                            material_grid, series_impedance, shunt_admittance,
                            slab_sparams, synth_sparams)
from .constants import C_LIGHT, EPS0, ETA0, MU0, TWO_PI
from .coupled_modes import (BareMode, Coupling, DampingProfile, HybridPair,
                            KittelParams, TrackedBranches, branch_linewidth,
                            crossing_field, damping_profile, hybrid_eigenvalues,
                            kittel_frequency, track_branches, zero_damping_fields,
                            zero_damping_window)
from .errors import DataError, SingularityError, UsageError
from .fitting import (BareModeFit, BranchData, CalibrationReport,
                      CalibrationTargets, FitResult, calibrate_circuit,
                      fit_bare_modes, fit_coupling)
from .nrw_extraction import (BranchJump, MaterialSpectrum, TwoPortSpectrum,
                             de_embed, extract_material, impedance_from_s,
                             nri_condition, propagation_term,
                             reflection_coefficient, refractive_index)

__version__ = "0.1.0"

__all__ = [
    "AblationResult", "BareMode", "BareModeFit", "BranchData", "BranchJump",
    "C_LIGHT", "CalibrationReport", "CalibrationTargets", "CellImmittance",
    "CircuitParams", "ContainmentReport", "Coupling", "DampingProfile",
    "DataError", "DisjointnessReport", "EPS0", "ETA0", "FieldFrequencyMap",
    "FitResult", "GridSpec", "HybridPair", "KittelParams", "MU0",
    "MaterialPoint", "MaterialSpectrum", "NriRegion", "SingularityError",
    "SweepResult", "TrackedBranches", "TWO_PI", "TwoPortSpectrum",
    "UsageError", "YigInductanceParams", "antidamping_window_for",
    "bloch_phase", "branch_linewidth", "build_maps", "calibrate_circuit",
    "calibrated_params", "correlate_antidamping", "coupling_sweep",
    "crossing_field", "damping_profile", "de_embed", "default_params",
    "detect_nri_regions", "direction_disjointness", "dominant_region",
    "extract_material", "fit_bare_modes", "fit_coupling",
    "hybrid_eigenvalues", "im_coupling_ablation", "impedance_from_s",
    "kittel_frequency", "l_yig", "material_from_circuit", "material_grid",
    "nri_condition", "propagation_term", "reflection_coefficient",
    "refractive_index", "region_is_present", "series_impedance",
    "shunt_admittance", "slab_sparams", "synth_sparams", "track_branches",
    "zero_damping_fields", "zero_damping_window",
]
