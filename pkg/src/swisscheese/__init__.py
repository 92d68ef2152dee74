"""Swiss-cheese counterexample domains and their quantitative estimates.

Build a punctured unit disk whose holes are calibrated by an admissible
weight, measure hole unions with optimized dyadic covers, and verify the
series, density, distance, and Taylor-remainder estimates that make the
construction work, plus the obstruction below the critical exponent.
"""

from .admissible import (AdmissibilityError, AdmissibilityReport,
                         AdmissibleFunction, GeometricGrid,
                         SubsequenceSelection, check_admissible,
                         select_subsequence)
from .conditions import (ConditionSpec, DensityProfile, DistanceCheck,
                         ObstructionReport, ObstructionSearch,
                         RemainderProfile, RemainderTerms, SeriesReport,
                         content_series, density_profile, dist_bounds_check,
                         empirical_remainder_ratios, geometric_rule,
                         obstruction_check, obstruction_search,
                         remainder_bound_terms, series_lower_bound,
                         series_verdict)
from .content import (ContentEstimate, CoverError, CoverEstimate, DiskUnion,
                      MeasureFunction, MeasureReport, check_measure_function,
                      content_disk_exact, content_hole, content_upper,
                      sample_in_target, verify_cover)
from .domain import (ConstructionError, ExceptionalSet, GeometryReport, Hole,
                     SamplingError, SwissCheeseDomain, annulus_index,
                     annulus_of, build_counterexample, hole_distance,
                     in_exceptional, sample_exceptional, sample_in_annulus,
                     validate_geometry)
from .testfn import (CircleContour, EstimationError, EvaluationError,
                     GenerationError, MelnikovReport, NormEstimate, PoleTerm,
                     QuadratureError, Region, TestFunction, annulus_boundary,
                     annulus_functional, center_functional, contour_integral,
                     lip_seminorm, melnikov_ratio, random_testfn)

__version__ = "0.1.0"
