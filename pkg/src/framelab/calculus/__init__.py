"""Syntax of the applied calculi: terms, parsing, typing, rewriting, enumeration."""

from .enumeration import enumerate_closed_terms
from .parser import parse_term, typecheck
from .reduction import CriticalPair, Reduction, critical_pairs, reduce, step
from .signatures import LAMBDA, LAMBDA_C, LAMBDA_S, RewriteScheme, Signature, get_signature
from .terms import App, Const, Lam, Meta, Term, Var, alpha_equal, apps, depth, lams, pretty

__all__ = [
    "App", "Const", "Lam", "Meta", "Term", "Var", "alpha_equal", "apps", "depth", "lams", "pretty",
    "LAMBDA", "LAMBDA_C", "LAMBDA_S", "RewriteScheme", "Signature", "get_signature",
    "parse_term", "typecheck", "CriticalPair", "Reduction", "critical_pairs", "reduce", "step", "enumerate_closed_terms",
]
