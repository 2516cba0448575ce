"""Bell-inequality violations from randomly oriented measurement triads.

Parties sharing a noisy maximally entangled state, with no common
reference frame, each measure along three perpendicular Bloch-sphere
directions.  This package decides, exactly and statistically, when such
measurements produce nonlocal correlations: closed-form correlation
tensors cross-checked against a dense state-vector simulator, the full
two-settings-per-site Bell-inequality family, the two-party analytic
violation region with its probability integral and noise bound, and
reproducible Monte Carlo experiments over the uniform orientation
measure.
"""

from .bipartite import (AnalyticIntermediates, REDUCED_LABELINGS, analytic_ab,
                        chi_threshold, nonviolation_bound, region_violates, theta_cut,
                        violation_probability_integral)
from .correlations import (CorrelationTensor, NoiseLevel, ghz_tensor, singlet_correlation,
                           singlet_tensor)
from .experiments import (CrosscheckReport, ProbabilityEstimate, RegionReport, SweepConfig,
                          SweepRow, estimate_probability, gamma_sweep, oracle_crosscheck,
                          region_crosscheck)
from .geometry import (BlochVector, CanonicalBipartite, RelabelingRecord, Triad,
                       TriadAngles, apply_record, apply_rotation, canonicalize_pair,
                       haar_random_triad, haar_random_triads, triad_from_angles,
                       triad_to_angles)
from .mabk import (Labeling, MabkTerm, ViolationVerdict, enumerate_labelings, local_bound,
                   mabk_terms, mabk_value, max_violation, tsirelson_threshold)
from .statevector import (FrequencyEstimate, MeasurementRecord, PureState, build_ghz,
                          build_singlet, estimate_correlations, exact_correlation,
                          sample_records)

__all__ = [
    "AnalyticIntermediates",
    "BlochVector",
    "CanonicalBipartite",
    "CorrelationTensor",
    "CrosscheckReport",
    "FrequencyEstimate",
    "Labeling",
    "MabkTerm",
    "MeasurementRecord",
    "NoiseLevel",
    "ProbabilityEstimate",
    "PureState",
    "REDUCED_LABELINGS",
    "RegionReport",
    "RelabelingRecord",
    "SweepConfig",
    "SweepRow",
    "Triad",
    "TriadAngles",
    "ViolationVerdict",
    "analytic_ab",
    "apply_record",
    "apply_rotation",
    "build_ghz",
    "build_singlet",
    "canonicalize_pair",
    "chi_threshold",
    "enumerate_labelings",
    "estimate_correlations",
    "estimate_probability",
    "exact_correlation",
    "gamma_sweep",
    "ghz_tensor",
    "haar_random_triad",
    "haar_random_triads",
    "local_bound",
    "mabk_terms",
    "mabk_value",
    "max_violation",
    "nonviolation_bound",
    "oracle_crosscheck",
    "region_crosscheck",
    "region_violates",
    "sample_records",
    "singlet_correlation",
    "singlet_tensor",
    "theta_cut",
    "triad_from_angles",
    "triad_to_angles",
    "tsirelson_threshold",
    "violation_probability_integral",
]

__version__ = "0.1.0"
