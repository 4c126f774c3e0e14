"""Graphical small cancellation over Z * Z: Rips-Segev graphs, piece and
cycle bounds, Dehn reduction and genericity experiments."""

__version__ = "0.1.0"

from .words import Word, parse_word, format_word, cyclic_reduce, cyclic_conjugates
from .graph import LabeledGraph, reduce, ab_subdivide, gamma_syllable
from .pieces import check_gr, max_piece_syllable
from .coefficients import CoefficientLine, CoefficientTable, check_rs_condition, gen_power_coefficients
from .underlying import UnderlyingGraph, gen_underlying, projective_underlying
from .rsgraph import RSGraph, label_underlying, build_gamma, emit_presentation
from .products import derive_sets, extract_witnesses
from .dehn import build_index, dehn_reduce, verify_embedding, verify_nup
from .genericity import is_rs_pattern, count_pattern_exact, mc_presentation, mc_graphical

__all__ = [
    "Word", "parse_word", "format_word", "cyclic_reduce", "cyclic_conjugates",
    "LabeledGraph", "reduce", "ab_subdivide", "gamma_syllable",
    "check_gr", "max_piece_syllable",
    "CoefficientLine", "CoefficientTable", "check_rs_condition", "gen_power_coefficients",
    "UnderlyingGraph", "gen_underlying", "projective_underlying",
    "RSGraph", "label_underlying", "build_gamma", "emit_presentation",
    "derive_sets", "extract_witnesses",
    "build_index", "dehn_reduce", "verify_embedding", "verify_nup",
    "is_rs_pattern", "count_pattern_exact", "mc_presentation", "mc_graphical",
]
