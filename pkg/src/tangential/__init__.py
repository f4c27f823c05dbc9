"""Finite-depth constructions of tangential-divergence counterexamples for
convolution operators on the unit circle."""
from .circle_sets import IntervalUnion, comb_set
from .counterexamples import BlaschkeFactor, BlaschkeProduct, SetSequence, build_sets, verify_lemma1
from .curves import ApproachCurve, solve_radius
from .errors import BracketError, QuadratureError, ScheduleError
from .kernels import Kernel
from .schedule import Schedule, build_schedule, validate_schedule

__version__ = "0.1.0"
#: version of the JSON config and output layout read and written by the CLI
CONFIG_SCHEMA_VERSION = 1

__all__ = [
    "ApproachCurve", "BlaschkeFactor", "BlaschkeProduct", "BracketError", "IntervalUnion",
    "Kernel", "QuadratureError", "Schedule", "ScheduleError", "SetSequence", "build_schedule",
    "build_sets", "comb_set", "solve_radius", "validate_schedule", "verify_lemma1",
]
