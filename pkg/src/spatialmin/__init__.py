"""Spatial model checking and bisimulation minimization for
quasi-discrete closure models: build models from graphs or 2D images,
evaluate spatial formulas with reachability operators, minimize by
partition refinement, and generate distinguishing formulas."""

from .model import Model, PointSet, SizeLimitError
from .formulas import (
    Formula, Atom, TrueF, FalseF, Not, Or, And,
    ReachFwd, ReachBwd, Near, Surrounded, Propagate,
    TRUE, FALSE, SourceSpan, FormulaSyntaxError,
    parse, format_formula, desugar,
    is_sublogic_minus, is_iml_formula, formula_atoms, conjunction,
)
from .checker import (
    SatResult, UnknownAtomWarning, sat, sat_oracle, reach_set, logically_equivalent,
)
from .bisim import (
    Partition, PointRelation,
    is_bisimulation_bf, is_bisimulation_eqrel,
    largest_bisimulation, eta_signature, is_eta_bisimulation,
)
from .minimize import (
    RefinementTrace, QuotientModel, partition_refine, quotient,
    characteristic_formula, distinguishing_formula,
)
from .closure_coalg import (
    FiniteClosureSpace, is_gcm_bisimulation, iml_equivalence,
    closure_functor_equivalence, quotient_space, iml_sat,
    iml_distinguishing_formula,
)
from .model_io import (
    DocumentError, ImageOptions, load_model, save_model, dumps_model, loads_model,
    load_closure_space, save_closure_space, dumps_closure_space, load_document,
    image_to_model, load_image_model, disjoint_union, restrict, emit_dot,
)

__version__ = "0.1.0"

__all__ = [
    "Model", "PointSet", "SizeLimitError",
    "Formula", "Atom", "TrueF", "FalseF", "Not", "Or", "And",
    "ReachFwd", "ReachBwd", "Near", "Surrounded", "Propagate",
    "TRUE", "FALSE", "SourceSpan", "FormulaSyntaxError",
    "parse", "format_formula", "desugar",
    "is_sublogic_minus", "is_iml_formula", "formula_atoms", "conjunction",
    "SatResult", "UnknownAtomWarning", "sat", "sat_oracle", "reach_set",
    "logically_equivalent",
    "Partition", "PointRelation",
    "is_bisimulation_bf", "is_bisimulation_eqrel",
    "largest_bisimulation", "eta_signature", "is_eta_bisimulation",
    "RefinementTrace", "QuotientModel", "partition_refine", "quotient",
    "characteristic_formula", "distinguishing_formula",
    "FiniteClosureSpace", "is_gcm_bisimulation", "iml_equivalence",
    "closure_functor_equivalence", "quotient_space", "iml_sat",
    "iml_distinguishing_formula",
    "DocumentError", "ImageOptions", "load_model", "save_model", "dumps_model",
    "loads_model", "load_closure_space", "save_closure_space",
    "dumps_closure_space", "load_document", "image_to_model", "load_image_model",
    "disjoint_union", "restrict", "emit_dot",
    "__version__",
]
