"""Exact-rational decision-theory dilemmas, theories, exploit audits and a learning lab."""

__version__ = "0.1.0"

from .core import (ChanceVar, DecisionPoint, Dilemma, DilemmaError, DispositionRule, Moment,
                   PredictorVar, Term, Token, expected_utility, validate)
from .bets import Bet, BetMenu, bind_bets
from .credence import AnthropicRule, anthropic_credence, simulation_cooperation_margin
from .theories import THEORIES, induced_policy, optimal_policy, recommend
from .exploit import evaluate_bets, run_money_pump, search_dutch_book
from .scenarios import SCENARIO_IDS, build, catalog
from .fileformat import DilemmaFileError, dumps, loads, parse_dilemma

__all__ = [
    "__version__", "ChanceVar", "DecisionPoint", "Dilemma", "DilemmaError", "DispositionRule", "Moment",
    "PredictorVar", "Term", "Token", "expected_utility", "validate", "Bet", "BetMenu", "bind_bets",
    "AnthropicRule", "anthropic_credence", "simulation_cooperation_margin", "THEORIES",
    "induced_policy", "optimal_policy", "recommend", "evaluate_bets", "run_money_pump",
    "search_dutch_book", "SCENARIO_IDS", "build", "catalog", "DilemmaFileError", "dumps", "loads",
    "parse_dilemma",
]
