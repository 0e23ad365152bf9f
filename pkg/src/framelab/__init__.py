"""Finite type frames, applied lambda calculi and extensional collapse certificates."""

from .frames import Element, Family, FrameLayer, build_layer, parse_family
from .simpletypes import BOOL, Arrow, parse_type, types_up_to
from .calculus import parse_term, pretty, get_signature, enumerate_closed_terms
from .semantics import interpret, unique_sound_constant, validate_delta_soundness
from .definability import saturate_definables, synthesize_S, synthesize_eq_S, totality_classes
from .relations import (
    E_BOOL,
    TOTALITY,
    certify_collapse,
    certify_iso,
    check_fundamental_property,
    compose,
    frame_relation,
    lift_logical,
    term_induced_relation,
)
from .theory import compare_theories, find_separating_pair

__version__ = "0.1.0"
