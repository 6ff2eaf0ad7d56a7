"""Finite-structure first-order concept-synthesis benchmark engine.

Thin wrapper over the compiled core. The heavy objects (formulas, worlds,
instances, pools) live in C++; eval records come back as JSON documents and
are decoded here for convenience.
"""

import json as _json

from ._folsynth import (  # noqa: F401
    Formula,
    FormatError,
    FormulaParseError,
    FrozenPool,
    GenerationExhausted,
    InstanceWorld,
    InsufficientData,
    InsufficientPool,
    PartialWorld,
    Prediction,
    ProblemInstance,
    ResourceLimitError,
    SamplingExhausted,
    SamplingParams,
    Template,
    World,
    ast_size,
    bands,
    baseline_solve,
    build_frozen_pool,
    builtin_templates,
    classify_family,
    ec_valid_instance,
    ec_valid_world,
    error_profile,
    evaluate,
    extension,
    extract_formula,
    gen_holdout,
    generate_corpus,
    grounded_dimacs,
    holdout_rate,
    instance_from_json,
    is_lift_hard,
    make_template,
    mask_unknowns,
    matches,
    min_mismatch,
    mutate,
    parse,
    print_formula,
    proper_subformulas,
    quantifier_depth,
    render_prompt,
    sample_world,
    shortcut_templates,
    solves_ci,
    solves_fullobs,
    subfamily_key,
    uses_equality,
)
from ._folsynth import evaluate_prediction as _evaluate_prediction_json


def evaluate_prediction(instance, prediction):
    """Score one prediction against one instance; returns the record dict."""
    return _json.loads(_evaluate_prediction_json(instance, prediction))
