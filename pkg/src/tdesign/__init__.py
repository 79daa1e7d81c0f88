"""Explicit approximate complex projective t-designs and the measurements they define."""

__version__ = "0.1.0"

from .design_builder import (
    Ensemble,
    ProductEnsemble,
    StateListEnsemble,
    build_design,
    build_design_improved,
    build_mub_design,
    from_spec,
    improved_size,
)
from .distinction import DistinctionReport, berger_bound, distinguish, haar_baseline, mub_counterexample
from .finite_field import GF, FieldElement, gf_mul, poly_eval
from .haar_moments import Monomial, haar_expectation, multiset_weight, symmetric_dim
from .kwise_families import FunctionFamily, binary_family, delta_family, exact_family, family_bias
from .povm_sim import composed_distribution, measure, sample_povm, stage_f, stage_g
from .quadrature import QuadratureRule, gauss_rule, haar_rule, limit_moments, round_rule
from .verifier import (
    VerificationReport,
    approx_epsilon,
    check_conditions,
    frame_operator,
    monomial_expectation,
)
