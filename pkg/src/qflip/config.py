"""Session configuration: who plays, over what source and channel, and when to stop.

A ``SessionConfig`` is immutable and fully determines a session given its
master seed.  The same object backs the batch engine, the HTTP service and
the networked referee; for the wire it has a canonical one-line-per-key
text form that both parties must declare identically.

Angles are stored in radians.  Config files and HTTP documents use degrees
(see ``parse_config_dict``); the conversion happens only at that boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional, Union

from .bloch import PI, ProtocolStateSet, protocol_state_set

BB84_PHI = PI / 4
FAIR_PHI = math.acos(4.0 / 5.0)

_PHI_PRESETS = {"bb84": BB84_PHI, "fair": FAIR_PHI}


class ConfigError(ValueError):
    """Raised for malformed or out-of-range session configuration."""


class SourceKind(str, Enum):
    ENTANGLED_PAIR = "entangled"
    ATTENUATED_PULSE = "attenuated"


class AliceKind(str, Enum):
    HONEST = "honest"
    ATTENUATED_HONEST = "attenuated_honest"
    CHEATING = "cheating"


class BobKind(str, Enum):
    HONEST = "honest"
    CHEATING = "cheating"
    SELECTIVE_ABORT = "selective_abort"
    MULTIPHOTON = "multiphoton"


_ADVERSARIAL_ALICE = {AliceKind.CHEATING}
_ADVERSARIAL_BOB = {BobKind.CHEATING, BobKind.SELECTIVE_ABORT, BobKind.MULTIPHOTON}


@dataclass(frozen=True)
class StrategyProfile:
    """Behavior of both roles; at most one side may be adversarial."""

    alice: AliceKind = AliceKind.HONEST
    bob: BobKind = BobKind.HONEST
    #: selective-abort parameters (radians / accepted outcome bits)
    bob_theta: Optional[float] = None
    bob_accept: Optional[frozenset[int]] = None
    #: cheating bob only: silently accept unfavorable outcomes instead of
    #: declaring a mismatch (comparison variant)
    bob_concede: bool = False

    def __post_init__(self) -> None:
        if self.alice in _ADVERSARIAL_ALICE and self.bob in _ADVERSARIAL_BOB:
            raise ConfigError("at most one of the two roles may cheat in a session")
        if self.bob is BobKind.SELECTIVE_ABORT:
            if self.bob_theta is None or not math.isfinite(self.bob_theta):
                raise ConfigError("selective_abort bob requires a finite bob_theta")
            if not self.bob_accept or not set(self.bob_accept) <= {0, 1}:
                raise ConfigError("selective_abort bob requires a nonempty accept set over {0, 1}")
        elif self.bob_theta is not None or self.bob_accept is not None:
            raise ConfigError("bob_theta / bob_accept only apply to selective_abort bob")
        if self.bob_concede and self.bob is not BobKind.CHEATING:
            raise ConfigError("bob_concede only applies to cheating bob")

    @property
    def cheater(self) -> Optional[str]:
        if self.alice in _ADVERSARIAL_ALICE:
            return "alice"
        if self.bob in _ADVERSARIAL_BOB:
            return "bob"
        return None

    def label(self) -> str:
        return f"{self.alice.value}/{self.bob.value}"


@dataclass(frozen=True)
class FixedCount:
    count: int

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ConfigError("fixed count must be >= 1")

    def canonical(self) -> str:
        return f"fixed:{self.count}"


@dataclass(frozen=True)
class ThresholdStop:
    """Stop and accuse once the mismatch rate exceeds tau (after a warm-up)."""

    tau: float
    min_samples: int
    max_flips: int = 1_000_000

    def __post_init__(self) -> None:
        if not 0.0 <= self.tau <= 1.0:
            raise ConfigError("threshold tau must lie in [0, 1]")
        if self.min_samples < 1 or self.max_flips < self.min_samples:
            raise ConfigError("threshold needs 1 <= min_samples <= max_flips")

    def canonical(self) -> str:
        return f"threshold:{self.tau!r}:{self.min_samples}:{self.max_flips}"


@dataclass(frozen=True)
class SprtStop:
    """Wald sequential test between mismatch rates p0 (honest) and p1 (cheating)."""

    p0: float
    p1: float
    alpha: float = 0.01
    beta: float = 0.01
    max_flips: int = 1_000_000

    def __post_init__(self) -> None:
        if not 0.0 <= self.p0 < self.p1 <= 1.0:
            raise ConfigError("sprt needs 0 <= p0 < p1 <= 1")
        if not (0.0 < self.alpha < 0.5 and 0.0 < self.beta < 0.5):
            raise ConfigError("sprt needs alpha, beta in (0, 0.5)")
        if self.max_flips < 1:
            raise ConfigError("sprt max_flips must be >= 1")

    def canonical(self) -> str:
        return f"sprt:{self.p0!r}:{self.p1!r}:{self.alpha!r}:{self.beta!r}:{self.max_flips}"


StopPolicy = Union[FixedCount, ThresholdStop, SprtStop]


@dataclass(frozen=True)
class SourceModel:
    """Photon source: what is emitted each time Alice presses the button.

    ``mu`` is the mean number of pairs (entangled source) or photons
    (attenuated pulse) per pulse, Poisson-distributed.  ``mu=None`` is the
    ideal limit: exactly one pair/photon per pulse.  ``visibility`` is the
    interference contrast of the delivered states, applied as a
    depolarizing purity factor.
    """

    kind: SourceKind = SourceKind.ENTANGLED_PAIR
    mu: Optional[float] = None
    visibility: float = 1.0

    def __post_init__(self) -> None:
        if self.mu is not None and (not math.isfinite(self.mu) or self.mu < 0):
            raise ConfigError("mu must be >= 0 when given")
        if not 0.0 <= self.visibility <= 1.0:
            raise ConfigError("visibility must lie in [0, 1]")


@dataclass(frozen=True)
class SessionConfig:
    phi: float
    profile: StrategyProfile
    source_kind: SourceKind = SourceKind.ENTANGLED_PAIR
    mu: Optional[float] = None
    eta: float = 1.0
    visibility: float = 1.0
    seed: int = 0
    stop: StopPolicy = FixedCount(1000)

    def __post_init__(self) -> None:
        if not math.isfinite(self.phi) or not 0.0 < self.phi <= PI / 4:
            raise ConfigError(f"phi must lie in (0, pi/4] radians, got {self.phi!r}")
        if not 0.0 <= self.eta <= 1.0:
            raise ConfigError("eta must lie in [0, 1]")
        if not 0.0 <= self.visibility <= 1.0:
            raise ConfigError("visibility must lie in [0, 1]")
        if self.mu is not None and (not math.isfinite(self.mu) or self.mu < 0):
            raise ConfigError("mu must be >= 0 when given")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must fit in 64 bits")
        if self.profile.alice is AliceKind.ATTENUATED_HONEST and self.source_kind is not SourceKind.ATTENUATED_PULSE:
            raise ConfigError("attenuated_honest alice requires the attenuated source")
        if self.profile.bob is BobKind.MULTIPHOTON and self.mu is None:
            raise ConfigError("multiphoton bob is pointless without a poissonian source (set mu)")

    @property
    def source(self) -> SourceModel:
        return SourceModel(self.source_kind, self.mu, self.visibility)

    def state_set(self) -> ProtocolStateSet:
        return protocol_state_set(self.phi)

    def canonical_text(self) -> str:
        """Stable key=value text; both wire parties must declare it byte-identically."""
        p = self.profile
        items = {
            "alice": p.alice.value,
            "bob": p.bob.value,
            "eta": repr(self.eta),
            "mu": "none" if self.mu is None else repr(self.mu),
            "phi": repr(self.phi),
            "seed": str(self.seed),
            "source": self.source_kind.value,
            "stop": self.stop.canonical(),
            "v": repr(self.visibility),
        }
        if p.bob is BobKind.SELECTIVE_ABORT:
            items["bob_accept"] = ",".join(str(o) for o in sorted(p.bob_accept))
            items["bob_theta"] = repr(p.bob_theta)
        if p.bob_concede:
            items["bob_concede"] = "1"
        return "\n".join(f"{k}={v}" for k, v in sorted(items.items()))


def _stop_from_canonical(text: str) -> StopPolicy:
    parts = text.split(":")
    try:
        if parts[0] == "fixed" and len(parts) == 2:
            return FixedCount(int(parts[1]))
        if parts[0] == "threshold" and len(parts) == 4:
            return ThresholdStop(float(parts[1]), int(parts[2]), int(parts[3]))
        if parts[0] == "sprt" and len(parts) == 6:
            return SprtStop(float(parts[1]), float(parts[2]), float(parts[3]), float(parts[4]), int(parts[5]))
    except ValueError as exc:
        raise ConfigError(f"bad stop policy {text!r}: {exc}") from None
    raise ConfigError(f"bad stop policy {text!r}")


def config_from_canonical_text(text: str) -> SessionConfig:
    """Inverse of SessionConfig.canonical_text (used to validate wire HELLOs)."""
    pairs: dict[str, str] = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        if "=" not in line:
            raise ConfigError(f"bad canonical config line {line!r}")
        key, value = line.split("=", 1)
        if key in pairs:
            raise ConfigError(f"duplicate canonical config key {key!r}")
        pairs[key] = value
    required = {"alice", "bob", "eta", "mu", "phi", "seed", "source", "stop", "v"}
    allowed = required | {"bob_accept", "bob_theta", "bob_concede"}
    if not required <= set(pairs) or not set(pairs) <= allowed:
        raise ConfigError("canonical config keys do not match the expected set")
    try:
        alice = AliceKind(pairs["alice"])
        bob = BobKind(pairs["bob"])
        kind = SourceKind(pairs["source"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    theta = float(pairs["bob_theta"]) if "bob_theta" in pairs else None
    accept = (
        frozenset(int(tok) for tok in pairs["bob_accept"].split(","))
        if "bob_accept" in pairs
        else None
    )
    try:
        return SessionConfig(
            phi=float(pairs["phi"]),
            profile=StrategyProfile(alice, bob, theta, accept, pairs.get("bob_concede") == "1"),
            source_kind=kind,
            mu=None if pairs["mu"] == "none" else float(pairs["mu"]),
            eta=float(pairs["eta"]),
            visibility=float(pairs["v"]),
            seed=int(pairs["seed"]),
            stop=_stop_from_canonical(pairs["stop"]),
        )
    except ValueError as exc:
        raise ConfigError(f"bad canonical config: {exc}") from None


def _reject_unknown(section: str, given: dict, allowed: set[str]) -> None:
    unknown = set(given) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")


def _get_float(section: dict, key: str, default=None):
    if key not in section:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return float(section[key])
    except (TypeError, ValueError):
        raise ConfigError(f"key {key!r} must be a number, got {section[key]!r}") from None


def parse_phi(value) -> float:
    """A phi given in degrees, or one of the presets 'bb84' / 'fair'."""
    if isinstance(value, str) and value.strip().lower() in _PHI_PRESETS:
        return _PHI_PRESETS[value.strip().lower()]
    try:
        return math.radians(float(value))
    except (TypeError, ValueError):
        raise ConfigError(f"phi_deg must be a number or one of {sorted(_PHI_PRESETS)}, got {value!r}") from None


def _parse_stop(section: dict) -> StopPolicy:
    _reject_unknown("stop", section, {"policy", "count", "tau", "min_samples", "max_flips",
                                      "p0", "p1", "alpha", "beta"})
    policy = str(section.get("policy", "fixed")).lower()
    if policy == "fixed":
        _reject_unknown("stop", section, {"policy", "count"})
        return FixedCount(int(section.get("count", 1000)))
    if policy == "threshold":
        kwargs = {}
        if "max_flips" in section:
            kwargs["max_flips"] = int(section["max_flips"])
        return ThresholdStop(_get_float(section, "tau"), int(section.get("min_samples", 100)), **kwargs)
    if policy == "sprt":
        kwargs = {}
        if "max_flips" in section:
            kwargs["max_flips"] = int(section["max_flips"])
        return SprtStop(
            _get_float(section, "p0"),
            _get_float(section, "p1"),
            _get_float(section, "alpha", 0.01),
            _get_float(section, "beta", 0.01),
            **kwargs,
        )
    raise ConfigError(f"unknown stop policy {policy!r}")


def _parse_profile(section: dict, phi: float) -> StrategyProfile:
    _reject_unknown("profile", section, {"alice", "bob", "bob_theta_deg", "bob_accept", "bob_concede"})
    try:
        alice = AliceKind(str(section.get("alice", "honest")).lower())
        bob = BobKind(str(section.get("bob", "honest")).lower())
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    theta = None
    accept = None
    if bob is BobKind.SELECTIVE_ABORT:
        theta = math.radians(_get_float(section, "bob_theta_deg", math.degrees(phi / 2)))
        raw = str(section.get("bob_accept", "0,1"))
        try:
            accept = frozenset(int(tok) for tok in raw.split(",") if tok.strip() != "")
        except ValueError:
            raise ConfigError(f"bob_accept must list outcome bits, got {raw!r}") from None
    elif "bob_theta_deg" in section or "bob_accept" in section:
        raise ConfigError("bob_theta_deg / bob_accept only apply to selective_abort bob")
    concede = str(section.get("bob_concede", "false")).lower() in ("1", "true", "yes", "on")
    return StrategyProfile(alice, bob, theta, accept, concede)


def parse_config_dict(doc: dict[str, Any], seed_override: Optional[int] = None) -> SessionConfig:
    """Build a SessionConfig from a nested dict (JSON document or parsed INI).

    Expected shape (angles in degrees at this boundary)::

        {"session": {"phi_deg": 45.0 | "bb84" | "fair", "eta": 1.0,
                     "visibility": 1.0, "seed": 42},
         "source":  {"kind": "entangled" | "attenuated", "mu": 0.05},
         "profile": {"alice": ..., "bob": ..., "bob_theta_deg": ..., "bob_accept": "0,1"},
         "stop":    {"policy": "fixed", "count": 1000}}

    Unknown sections or keys are rejected, never ignored.
    """
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a mapping of sections")
    _reject_unknown("<top>", doc, {"session", "source", "profile", "stop"})
    session = dict(doc.get("session") or {})
    _reject_unknown("session", session, {"phi_deg", "eta", "visibility", "seed"})
    if "phi_deg" not in session:
        raise ConfigError("missing required key 'phi_deg' in [session]")
    phi = parse_phi(session["phi_deg"])

    source = dict(doc.get("source") or {})
    _reject_unknown("source", source, {"kind", "mu"})
    try:
        kind = SourceKind(str(source.get("kind", "entangled")).lower())
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    mu = None if source.get("mu") in (None, "", "none") else _get_float(source, "mu")

    profile = _parse_profile(dict(doc.get("profile") or {}), phi)
    stop = _parse_stop(dict(doc.get("stop") or {}))

    seed = seed_override if seed_override is not None else session.get("seed")
    if seed is None:
        raise ConfigError("a master seed is required (config [session] seed or --seed)")

    return SessionConfig(
        phi=phi,
        profile=profile,
        source_kind=kind,
        mu=mu,
        eta=_get_float(session, "eta", 1.0),
        visibility=_get_float(session, "visibility", 1.0),
        seed=int(seed),
        stop=stop,
    )


def parse_config_ini(text: str, seed_override: Optional[int] = None) -> SessionConfig:
    """Parse the flat key/value config-file format (INI sections, degrees)."""
    import configparser

    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file: {exc}") from None
    doc: dict[str, Any] = {}
    for section in parser.sections():
        doc[section] = dict(parser.items(section))
    return parse_config_dict(doc, seed_override=seed_override)
