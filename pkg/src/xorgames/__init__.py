"""Quantum advantage certificates for XOR games, with game graph capacity checks."""

__version__ = "0.1.0"

from .game import ClassicalSolution, GameError, XorGame, classical_value, game_from_matrix, load_game, validate_game
from .quantum import QuantumSolution, quantum_value
from .certificate import cor1_check, no_advantage, symmetric_reduction_check, thm1_certificate
from .graph import GameGraph, build_graph_operator, build_graph_rules, independence_number, spectrum_formula, structural_checks
from .theta import class1_certify, closed_form_witness, lovasz_theta

__all__ = [
    "ClassicalSolution",
    "GameError",
    "GameGraph",
    "QuantumSolution",
    "XorGame",
    "build_graph_operator",
    "build_graph_rules",
    "class1_certify",
    "classical_value",
    "closed_form_witness",
    "cor1_check",
    "game_from_matrix",
    "independence_number",
    "load_game",
    "lovasz_theta",
    "no_advantage",
    "quantum_value",
    "spectrum_formula",
    "structural_checks",
    "symmetric_reduction_check",
    "thm1_certificate",
    "validate_game",
]
