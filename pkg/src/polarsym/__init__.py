"""Separability, polarization and symmetry analysis of sampled positive functions."""

__version__ = "0.1.0"

from ._backend import backend_name
from .errors import PolarsymError
from .geometry import AxisLine, Cap, HalfSpace, dual_point, hull_membership, reflect
from .circle import CircleFn, circle_axis_and_profile, circle_reflections, extremal_arcs, is_separable_circle
from .sphere import SphereFn, corollary_direction_check, is_separable_sphere, restrict_to_circle, sphere_caps_and_axis
from .ball import BallFn, ball_axis, is_separable_ball, make_separable_ball
from .wholespace import (FieldFn, axis_through_point, even_monotone_check, is_separable_field,
                         radial_center_and_profile)
from .polarization import PairedGrid, decompose_D_difference, partition, polarize
from .green import GreenKernel, green
from .choquard import ChoquardProblem, GroundState, certify_theorem41, solve_ground_state

__all__ = [
    "AxisLine", "BallFn", "Cap", "ChoquardProblem", "CircleFn", "FieldFn", "GreenKernel", "GroundState",
    "HalfSpace", "PairedGrid", "PolarsymError", "SphereFn", "axis_through_point", "backend_name",
    "ball_axis", "certify_theorem41", "circle_axis_and_profile", "circle_reflections",
    "corollary_direction_check", "decompose_D_difference", "dual_point", "even_monotone_check",
    "extremal_arcs", "green", "hull_membership", "is_separable_ball", "is_separable_circle",
    "is_separable_field", "is_separable_sphere", "make_separable_ball", "partition", "polarize",
    "radial_center_and_profile", "reflect", "restrict_to_circle", "solve_ground_state",
    "sphere_caps_and_axis",
]
