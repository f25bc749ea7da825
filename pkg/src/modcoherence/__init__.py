"""Modified trace distance of coherence: closed forms, dual certificates,
a certified numerical solver and Haar-random experiments."""

from .closed_forms import (DualCertificate, IncoherentWitness, InfeasibleCertificateError,
                           close_phase_polygon, dual_certificate_pure, l1_coherence,
                           pure_mod_trace, pure_optimal_witness, qubit_mod_trace,
                           qubit_optimal_set, range_projector_margin, verify_dual,
                           witness_eigenpair)
from .estimators import CoherenceMeasure
from .experiments import (ProportionReport, SweepConfig, exact_proportion, f_density,
                          fifty_percent_crossing, mc_pure_proportion, mc_rank_proportion)
from .solver import (SolverOptions, SolverResult, mod_trace_distance, subgradient_step,
                     trace_distance_coherence)
from .states import canonicalize, haar_pure, random_density, substream
from .validation import ValidationError

__version__ = "0.1.0"

__all__ = [
    "CoherenceMeasure", "DualCertificate", "IncoherentWitness", "InfeasibleCertificateError",
    "ProportionReport", "SolverOptions", "SolverResult", "SweepConfig", "ValidationError",
    "canonicalize", "close_phase_polygon", "dual_certificate_pure", "exact_proportion",
    "f_density", "fifty_percent_crossing", "haar_pure", "l1_coherence", "mc_pure_proportion",
    "mc_rank_proportion", "mod_trace_distance", "pure_mod_trace", "pure_optimal_witness",
    "qubit_mod_trace", "qubit_optimal_set", "random_density", "range_projector_margin",
    "subgradient_step", "substream", "trace_distance_coherence", "verify_dual",
    "witness_eigenpair",
]
