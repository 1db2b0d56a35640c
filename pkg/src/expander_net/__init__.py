"""Triple-junction networks that expand homothetically under curve shortening flow."""

from .core import (LAMBDA, GraphSolution, IvpData, ScalingLaw, asymptotic_slope, integrate_ivp,
                   scale_network_time, slope_error_bound)
from .errors import (BracketFailure, CertificateFailure, ConfigMismatch, DegenerateInput,
                     DomainTooShort, ExpanderError, InvalidConfig, NoConvergence,
                     NoIntersection, NonpositiveTime, NoUniqueSmallestSegment,
                     StabilityViolation, StepSizeUnderflow, ToleranceNotMet, Unsupported)
from .geometry import HalfLine, PlaneCurve
from .network import (ExpandingNetwork, NetworkConfig, SolveReport, certify, network_at_time,
                      sector_angles, sector_area_rates, smallest_segment_check,
                      solve_triple_point, tangent_field, uniqueness_probe)
from .shooting import (ShootResult, curve_through_point, expander_curve, height_for_slope,
                       slope_for_height)
from .verify import (AngleAreaReport, AngleChainReport, PdeProfile, angle_area_check,
                     angle_chain_diagnostic, evolve_graph_csf, expander_identity_residual,
                     self_similarity_residual)

__version__ = "0.1.0"
