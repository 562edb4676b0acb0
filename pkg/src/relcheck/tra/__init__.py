"""Relational algebra with updates: terms, translation and axioms."""

from . import terms
from .axioms import Axiom, AxiomSet, instantiate_axioms, redundant_axioms
from .printer import sexpr, show
from .subst import CaptureError, substitute, substitute_many
from . import translate
from .translate import IDENTITY, Side

__all__ = [
    "terms", "Axiom", "AxiomSet", "instantiate_axioms", "redundant_axioms",
    "sexpr", "show", "CaptureError", "substitute", "substitute_many",
    "IDENTITY", "Side", "translate",
]
