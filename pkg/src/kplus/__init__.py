"""Cyclic proofs and cut elimination for the modal logic K+.

K+ has a box ``[]`` for a relation and a box ``[+]`` for its transitive
closure.  The package provides formulas and sequents, a checker for cyclic
proofs with annotations, lazy proof transformations (weakening, inversion,
contraction, cut removal), regularization of their results back into cyclic
proofs, and translations to and from Hilbert-style derivations.
"""

from . import admissible, cutelim, engine, formula, hilbert, proof, sequent
from .admissible import (
    LeftImp,
    RightImp,
    ShapeError,
    Side,
    UnBot,
    UnImp,
    atomic_contract,
    contract,
    identity_proof,
    invert,
    weaken,
)
from .cutelim import cut_result, eliminate_cuts, remove_cut
from .engine import Fuel, FuelExhausted, NonProductive, ProofStream, fuel_scope, regularize, stream_of
from .formula import (
    BOT,
    Bot,
    Box,
    BoxPlus,
    Formula,
    Imp,
    ParseError,
    Var,
    conj,
    conj_all,
    disj,
    disj_all,
    neg,
    parse_formula,
    print_formula,
    top,
)
from .hilbert import check_derivation, hilbert_to_sequent, is_tautology, sequent_to_hilbert
from .proof import (
    CyclicProof,
    ProofBuilder,
    Rule,
    check_proof,
    dump_proof,
    fragment_equal,
    load_proof,
    local_height,
    n_fragment,
    proof_equal,
)
from .sequent import (
    CIRCLE,
    AnnotationError,
    Multiset,
    Sequent,
    annotation_candidates,
    parse_goal,
    parse_sequent,
    print_goal,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
