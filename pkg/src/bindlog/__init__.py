"""Logic kernel for a predicate logic whose function and predicate symbols
bind variables in their arguments.

Submodules: syntax (named-binder terms and propositions), proofs (sequent
calculus checkers, plain and modulo a rewrite congruence), sigma (the sorted
explicit-substitution layer and its rewrite engine), precook (the
translation between the two layers), models (intensional functional
structures and counter-model evaluation), cli (the command-line frontend).
"""

from . import models, precook, proofs, sigma, syntax  # noqa: F401
from .syntax import Signature, parse_prop, parse_term, parse_signature  # noqa: F401

__version__ = "0.1.0"
