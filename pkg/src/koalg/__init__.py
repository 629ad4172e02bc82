"""Games as coalgebras: processes, strategies, game trees and equilibrium checks."""

from .catalog import GAMES, MonitoringParams, build_game, default_candidates
from .choice import Choice, Kind, distribute, flatten, map_choice, pair, unit
from .equilibrium import (
    NModification,
    Verdict,
    best_response,
    enumerate_nmods,
    nash_check,
    subgame_perfect_check,
)
from .errors import KoalgError
from .game import Game, Strategy, close, fix_strategies, make_game, rollout
from .matrix import MatrixGameSpec, build_matrix_game, parse_matrix_spec, serialize_matrix_spec
from .outcome import OutcomeSpec, evaluate, evaluate_ndet, evaluate_to_tolerance
from .process import (
    Continue,
    Process,
    Result,
    cascade,
    feedback,
    make_process,
    map_input,
    map_output,
    probe,
    process_product,
    process_sum,
)
from .strategies import builtin_strategy
from .tree import GameTree, check_commutes, unfold

__version__ = "0.1.0"
