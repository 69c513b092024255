"""Fuzzy object-oriented dynamic networks: fuzzy objects, classes and their algebra."""

from .algebra import (
    ObjectSet,
    clone,
    core_and_projections,
    difference,
    intersection,
    symmetric_difference,
    union,
    union_all,
)
from .evaluate import evaluate, guard_holds
from .expr import Guard, MethodDef, alpha_equivalent, method, parse_expr, parse_guard, to_source
from .fuzzy import (
    Degree,
    Type1FuzzySet,
    Type2FuzzySet,
    concentration,
    dilution,
    lift,
    make_type1,
    make_type2,
    map_unary,
    map_unary_type2,
)
from .kb import Derivation, KnowledgeBase
from .model import (
    CrispScalar,
    CrispTuple,
    Fuzzy1,
    Fuzzy2,
    FuzzyClass,
    FuzzyObject,
    Heterogeneous,
    Homogeneous,
    Projection,
    Property,
    Signature,
    Specification,
    TupleOfFuzzy,
    Verification,
    eq_property,
    eq_qualitative,
    eq_quantitative,
    homogeneous,
    instantiate,
    same_type,
)
from .modifiers import (
    Add,
    Concentrate,
    DependencyRule,
    Dilute,
    MapValues,
    Modifier,
    Remove,
    SetValue,
    apply_fuzzy_modifier,
    apply_modifier,
    check_consistency,
)
from .persistence import load, save

__version__ = "0.1.0"
