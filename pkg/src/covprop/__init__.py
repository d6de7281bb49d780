"""Exact distances between finite metric monoids and the dynamical systems they drive."""

from __future__ import annotations

from .almost_iso import AlmostIsoPair, check_almost_iso, compose, derived_properties, inverse_estimate
from .errors import CovpropError, DomainError, LemmaViolation, ParseError
from .limits import (
    MonoidChain,
    cauchy_bound,
    check_regular,
    compose_chain,
    limit_experiment,
    lift_element,
    validate_chain,
)
from .monoid import FiniteMetricMonoid, ball, cyclic_group, group_inverse, inverse_modulus, validate_monoid
from .qcms import (
    FiniteQCMS,
    LipschitzDynamicalSystem,
    MarkovMap,
    State,
    action_modulus,
    dil_markov,
    induced_length_metric,
    mk_dist_maps,
    validate_system,
    w1,
)
from .rational import SQRT2_OVER_2, Surd, fmt, parse_value
from .tunnels import CovariantTunnel, covprop_upper_bound, extent, magnitude, reach, target_set
from .upsilon import gh_compact, gh_pointed, upsilon, upsilon_star

__version__ = "0.1.0"

__all__ = [
    "AlmostIsoPair",
    "CovariantTunnel",
    "CovpropError",
    "DomainError",
    "FiniteMetricMonoid",
    "FiniteQCMS",
    "LemmaViolation",
    "LipschitzDynamicalSystem",
    "MarkovMap",
    "MonoidChain",
    "ParseError",
    "SQRT2_OVER_2",
    "State",
    "Surd",
    "action_modulus",
    "ball",
    "cauchy_bound",
    "check_almost_iso",
    "check_regular",
    "compose",
    "compose_chain",
    "covprop_upper_bound",
    "cyclic_group",
    "derived_properties",
    "dil_markov",
    "extent",
    "fmt",
    "gh_compact",
    "gh_pointed",
    "group_inverse",
    "induced_length_metric",
    "inverse_estimate",
    "inverse_modulus",
    "lift_element",
    "limit_experiment",
    "magnitude",
    "mk_dist_maps",
    "parse_value",
    "reach",
    "target_set",
    "upsilon",
    "upsilon_star",
    "validate_chain",
    "validate_monoid",
    "validate_system",
    "w1",
    "__version__",
]
