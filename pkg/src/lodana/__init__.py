"""Expert-in-the-loop logical analysis of labeled binary data.

Binarized records become points of GF(2)^n; the selection criteria that
match no observed record form an ideal of the Boolean quotient ring, and
its Groebner basis is mined for classification rules an expert reviews.
"""

__version__ = "0.1.0"

from .errors import (
    DecisionError,
    InputError,
    LodanaError,
    PhaseError,
    TraceMismatchError,
)
from .boolring import (
    BoolPoly,
    MonomialOrder,
    PolyParseError,
    RingError,
    Variable,
    VariableTable,
    anf_from_truth_table,
    leading_monomial,
    mono_degree,
    mono_mul,
    parse_poly,
    poly_add,
    poly_eval,
    poly_mul,
    render_factored,
    truth_table,
)
from .gbasis import GroebnerBasis, buchberger, is_groebner, normal_form, s_polynomial
from .dataset import (
    Pattern,
    PatternTable,
    Record,
    RecordTable,
    Thresholds,
    binarize,
    build_sigma,
    compute_thresholds,
    count_empty_criteria,
    parse_records,
    pattern_indicator,
)
from .ideals import Ideal, extend, ideal_from_patterns, membership, remainders_mod, zero_ideal
from .rules import (
    Rule,
    RuleError,
    count_selection,
    extract_rules,
    factor_disjoint,
    generalize,
    split_on_class,
)
from .workflow import (
    DecisionTrace,
    ExceptionPolicy,
    RelevancePolicy,
    Report,
    SessionState,
    decide_exceptions,
    decide_insights,
    exception_candidates,
    final_report,
    insight_candidates,
    replay,
    run_policy,
    start_session,
    verify_rules,
)

__all__ = [
    "__version__",
    "BoolPoly",
    "DecisionError",
    "DecisionTrace",
    "ExceptionPolicy",
    "GroebnerBasis",
    "Ideal",
    "InputError",
    "LodanaError",
    "MonomialOrder",
    "Pattern",
    "PatternTable",
    "PhaseError",
    "PolyParseError",
    "Record",
    "RecordTable",
    "RelevancePolicy",
    "Report",
    "RingError",
    "Rule",
    "RuleError",
    "SessionState",
    "Thresholds",
    "TraceMismatchError",
    "Variable",
    "VariableTable",
    "anf_from_truth_table",
    "binarize",
    "buchberger",
    "build_sigma",
    "compute_thresholds",
    "count_empty_criteria",
    "count_selection",
    "decide_exceptions",
    "decide_insights",
    "exception_candidates",
    "extend",
    "extract_rules",
    "factor_disjoint",
    "final_report",
    "generalize",
    "ideal_from_patterns",
    "insight_candidates",
    "is_groebner",
    "leading_monomial",
    "membership",
    "mono_degree",
    "mono_mul",
    "normal_form",
    "parse_poly",
    "parse_records",
    "pattern_indicator",
    "poly_add",
    "poly_eval",
    "poly_mul",
    "remainders_mod",
    "render_factored",
    "replay",
    "run_policy",
    "s_polynomial",
    "split_on_class",
    "start_session",
    "truth_table",
    "verify_rules",
    "zero_ideal",
]
