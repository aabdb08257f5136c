"""WIDTIO instance-level evolution for DL-Lite_{A,id} knowledge bases."""

from .evolution import (
    EvolutionResult,
    accomplishes_deletion,
    accomplishes_insertion,
    compute_deletion,
    compute_insertion,
)
from .model import KnowledgeBase, Signature, atoms_individuals, partition_tbox
from .parser import ParseError, parse_changelog, parse_facts, parse_kb, serialize_kb
from .reasoner import (
    PreconditionError,
    closure,
    entails_atom,
    eval_path,
    is_satisfiable,
    member_basic,
    subsumee,
    violation_sets,
)

__version__ = "0.1.0"
