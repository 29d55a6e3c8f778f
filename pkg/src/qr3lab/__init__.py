"""Quasirandomness, counting and regularity tools for 3-uniform hypergraphs."""

from .core import (GuardError, Hypergraph3, HypergraphError, OrderedPairSet, ParseError, VertexSet,
                   complete, parse_hypergraph, read_hypergraph, write_hypergraph)
from .counting import K4, K4MINUS, Pattern, contains_K4, count_labeled, count_unordered, parse_pattern
from .generators import (PairColouring, Tournament, bichromatic_hypergraph, cyclic_triangle_hypergraph,
                         random_colouring, random_hypergraph, random_tournament, turan_construction)
from .quasirandomness import (DeviationReport, Notion, count, deviation, deviation_ascent,
                              deviation_exact, deviation_sample, is_quasirandom)
from .reduced import (K4Pattern, ReducedHypergraph, StepFailure, degree_hypothesis, find_hole,
                      find_pattern_bruteforce, hole_signature, lemma_solver, validate_pattern)
from .regularity import Triad, relative_density, tcl_check, triad_regularity, triangles

__version__ = "0.1.0"
