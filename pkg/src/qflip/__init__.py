"""Loss-tolerant quantum coin flipping: simulator, analysis and networked play."""

from .analysis import (
    Decision,
    ScenarioPrediction,
    SprtTest,
    ThresholdTest,
    estimate_cheat_fraction,
    find_fair_phi,
    p_alice_opt,
    p_bob_opt,
    predict,
    sequential_step,
)
from .bloch import (
    CircleDensity,
    ProtocolStateSet,
    StateAngle,
    depolarize,
    helstrom_guess_prob,
    max_confidence,
    measure,
    overlap_prob,
    protocol_state_set,
    state_from_angle,
)
from .config import (
    AliceKind,
    BB84_PHI,
    BobKind,
    ConfigError,
    FAIR_PHI,
    FixedCount,
    SessionConfig,
    SourceKind,
    SprtStop,
    StrategyProfile,
    ThresholdStop,
)
from .engine import (
    FlipRecord,
    SessionRunner,
    SessionStats,
    run_instance,
    run_session,
    verify,
)
from .source import apply_loss, emit, sample_photon_count

__all__ = [
    "AliceKind",
    "BB84_PHI",
    "BobKind",
    "CircleDensity",
    "ConfigError",
    "Decision",
    "FAIR_PHI",
    "FixedCount",
    "FlipRecord",
    "ProtocolStateSet",
    "ScenarioPrediction",
    "SessionConfig",
    "SessionRunner",
    "SessionStats",
    "SourceKind",
    "SprtStop",
    "SprtTest",
    "StateAngle",
    "StrategyProfile",
    "ThresholdStop",
    "ThresholdTest",
    "apply_loss",
    "depolarize",
    "emit",
    "estimate_cheat_fraction",
    "find_fair_phi",
    "helstrom_guess_prob",
    "max_confidence",
    "measure",
    "overlap_prob",
    "p_alice_opt",
    "p_bob_opt",
    "predict",
    "protocol_state_set",
    "run_instance",
    "run_session",
    "sample_photon_count",
    "sequential_step",
    "state_from_angle",
    "verify",
]
