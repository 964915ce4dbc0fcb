"""Commutator calculus in free and free nilpotent groups.

Words and free-group identities, Magnus expansions, Hall bases and normal
forms in F_m / gamma_q, lattices of subgroups given by generating families,
Milnor mu-bar invariants from longitudes, and crossing-change invariants.
"""

from .errors import CommCalcError
from .hall import BasicCommutator, HallBasis, generate_basis, witt_count
from .magnus import TruncatedSeries, expand
from .milnor import LinkPresentation, classify_mu, mu, parse_presentation
from .nilpotent import ExponentVector, NilpotentContext, context
from .subgroups import GeneratorScheme, SubgroupLattice, build_lattice, compare_lattices
from .words import Word, parse_word, verify_identity

__version__ = "0.1.0"

__all__ = [
    "BasicCommutator", "CommCalcError", "ExponentVector", "GeneratorScheme", "HallBasis",
    "LinkPresentation", "NilpotentContext", "SubgroupLattice", "TruncatedSeries", "Word",
    "build_lattice", "classify_mu", "compare_lattices", "context", "expand", "generate_basis",
    "mu", "parse_presentation", "parse_word", "verify_identity", "witt_count",
]
