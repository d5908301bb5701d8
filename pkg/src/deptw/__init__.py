"""Dependency treewidth for quantified Boolean formulas."""

from .chain import find_ordering_of_width, min_width_via_chains
from .decomp import (
    DependencyTreeDecomposition,
    check_compatibility,
    decomposition_to_ordering,
    fill_in_graph,
    ordering_to_decomposition,
    ordering_width,
    validate_decomposition,
)
from .dp import solve
from .game import build_arena, solve_game, treewidth_via_game
from .oracle import brute_force_min_width, brute_force_truth
from .poset import DependencyPoset, build_trivial_poset, chain_partition, parse_poset_file
from .proof import Refutation, check_refutation, parse_proof, serialize
from .qbf import PrimalGraph, QbfInstance, build_primal_graph, generate_family, parse_qdimacs, to_qdimacs

__version__ = "0.1.0"
