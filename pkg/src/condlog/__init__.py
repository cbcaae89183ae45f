"""Workbench for quantified conditional logic.

Finite-model checking over selection, ordering, and quasi-selection
frames; frame-condition decision procedures; Hilbert proof verification
for the Stalnaker-Thomason family of logics; a symbolic engine for the
infinite ordering countermodel on the negative integers; and exhaustive
small-frame searches.
"""

from .syntax import (
    And,
    Atom,
    Bot,
    Box,
    Cond,
    Dia,
    EPred,
    Eq,
    Exists,
    F,
    Forall,
    Formula,
    FormulaError,
    Iff,
    Imp,
    Lang,
    Not,
    Or,
    Predicate,
    Top,
    Variable,
    alpha_equal,
    build_ds,
    counting_exists,
    free_variables,
    language,
    material_reduct,
    metrics,
    substitute,
)
from .parser import ParseError, parse_formula, parse_formula_file, print_formula
from .semantics import (
    Model,
    NotStalnakerian,
    OrderingFrame,
    QuasiSelectionFrame,
    ResourceGuard,
    SelectionFrame,
    evaluate,
    extension,
    frame_valid,
    model_valid,
    ordering_to_selection,
    selection_to_ordering,
)
from .frameprops import (
    FrameReport,
    check_domain_props,
    check_ordering_props,
    check_selection_props,
    qc2_correspondence_check,
)
from .hilbert import (
    LOGICS,
    AxiomInstance,
    ProofLine,
    ProofScript,
    RuleApplication,
    Verdict,
    check_rule,
    is_axiom_instance,
    mod_theorem_proof,
    verify_proof,
)
from .kmodel import (
    MINUS_INF,
    KSet,
    cem_sweep,
    cond_at_origin,
    denote_k,
    eval_k,
    induced_selection_probe,
    monadic_nf,
    qc2_axiom_sweep,
    truncate,
)
from .search import (
    EnumerationParams,
    SearchOutcome,
    compactness_witness,
    ds_sweep,
    enumerate_frames,
)
from .fileformats import DocumentError, dump_model, dump_proof, load_model, load_proof

__version__ = "0.1.0"
