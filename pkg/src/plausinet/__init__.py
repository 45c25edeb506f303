"""Conditional plausibility measures, their axioms, independence and
Bayesian networks, checked exactly over small finite world spaces."""

from .algebras import ALGEBRAIC_FAMILIES, ALL_KINDS, make_measure, random_measure
from .axioms import CheckReport, Witness, run_axioms
from .bayesnet import Dag, QuantitativeBN, build_network, d_separated, extract_cpts, reconstruct
from .core import ConditionalPlausibilityMeasure, PlausibilityError, WorldSpace
from .independence import indep_events, indep_rv, noninteractive

__all__ = [
    "ALGEBRAIC_FAMILIES",
    "ALL_KINDS",
    "CheckReport",
    "ConditionalPlausibilityMeasure",
    "Dag",
    "PlausibilityError",
    "QuantitativeBN",
    "Witness",
    "WorldSpace",
    "build_network",
    "d_separated",
    "extract_cpts",
    "indep_events",
    "indep_rv",
    "make_measure",
    "noninteractive",
    "random_measure",
    "reconstruct",
    "run_axioms",
]
