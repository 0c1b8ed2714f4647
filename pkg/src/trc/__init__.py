"""Triplet region construction: approximate inference for discrete Bayesian networks."""
from .errors import (DomainError, FormatError, InvalidInput, NotComplete, NotConverged, NumericalFailure,
                     SupportMismatch, TooLarge, TooManyParents, TRCError, UnknownVariable, ValidationError)
from .factorize import binary_factorize, kappa, kappa_structure, sparse_to_bfg, to_kappa_bfg
from .generators import asia, random_complete_bn, random_kappa_bfg, switching_dbn
from .markov import moralize
from .model import CPT, DiscreteNetwork, Evidence, VariableDecl, validate_network
from .oracle import compare_report, exact_marginals, kl_distance
from .ori import outer_regions
from .propagate import EngineConfig, TRCConfig, build_regions, cccp_run, gbp_run, trc_run
from .regions import RegionGraph, cvm_construct
from .report import MarginalReport, mean_value
from .rgbf import rgbf_transform
