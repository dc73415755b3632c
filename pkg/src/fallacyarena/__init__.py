"""fallacyarena: a serious-game platform for collecting and crowd-labeling
fallacious arguments.

Players write arguments committing a requested fallacy and judge arguments
written by others; every authored piece and every judgment doubles as an
annotation vote. An unsupervised EM model over rater reliability turns the
accumulated votes into gold labels, so the corpus annotates itself as a side
effect of play.
"""

from .aggregation import (
    AggregationConfig,
    CrowdSpec,
    EmConfig,
    GoldBatch,
    JudgmentMatrix,
    MaceResult,
    brute_force_posteriors,
    estimate_gold,
    majority_vote,
    run_em,
    simulate_crowd,
)
from .config import (
    ContentPack,
    GameConfig,
    LevelConfig,
    LocaleBundle,
    RoundConfig,
    ScoringConfig,
    WorldConfig,
    load_content_pack,
    load_game_config,
    load_locale,
)
from .domain import (
    LABELS,
    WRITABLE_LABELS,
    Argument,
    FallacyLabel,
    GoldAssignment,
    Judgment,
    ScoreEvent,
    Topic,
    UserAccount,
)
from .errors import GameError
from .store import Journal, MemoryJournal, Repository, open_repository

__version__ = "1.0.0"

__all__ = [
    "AggregationConfig",
    "Argument",
    "ContentPack",
    "CrowdSpec",
    "EmConfig",
    "FallacyLabel",
    "GameConfig",
    "GameError",
    "GoldAssignment",
    "GoldBatch",
    "Journal",
    "Judgment",
    "JudgmentMatrix",
    "LABELS",
    "LevelConfig",
    "LocaleBundle",
    "MaceResult",
    "MemoryJournal",
    "Repository",
    "RoundConfig",
    "ScoreEvent",
    "ScoringConfig",
    "Topic",
    "UserAccount",
    "WRITABLE_LABELS",
    "WorldConfig",
    "brute_force_posteriors",
    "estimate_gold",
    "load_content_pack",
    "load_game_config",
    "load_locale",
    "majority_vote",
    "open_repository",
    "run_em",
    "simulate_crowd",
    "__version__",
]
