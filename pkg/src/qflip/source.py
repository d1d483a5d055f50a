"""Photon emission, multi-pair statistics and the lossy channel.

Two source models are supported.  With an entangled-pair source Alice's
local projection remotely prepares the transmitted qubit, so the first
photon of a pulse carries her intended state while any extra pair is
completely uncorrelated with it (modeled as an independent, uniformly
random honest state).  With an attenuated pulse every photon of the pulse
carries the identical prepared state, which is exactly the side channel a
multi-photon measurement attack exploits.

All delivered states are depolarized by the source visibility; channel and
detector loss is a single per-photon survival probability eta.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .bloch import CircleDensity, ProtocolStateSet, StateAngle, depolarize
from .config import SourceKind, SourceModel


def sample_photon_count(mu: float, rng: np.random.Generator) -> int:
    """Poisson photon/pair count for one pulse of mean ``mu``."""
    if mu < 0:
        raise ValueError(f"mu must be >= 0, got {mu!r}")
    if mu == 0.0:
        return 0
    return int(rng.poisson(mu))


@lru_cache(maxsize=1024)
def _delivered(theta: float, visibility: float) -> CircleDensity:
    # The handful of protocol angles recur every attempt; share the objects.
    return depolarize(CircleDensity.pure(StateAngle(theta)), visibility)


def emit(
    source: SourceModel,
    prepared: StateAngle,
    state_set: ProtocolStateSet,
    rng: np.random.Generator,
) -> list[CircleDensity]:
    """Emit one pulse for the state Alice intends to send.

    ``mu=None`` emits exactly one photon (ideal source); otherwise the count
    is Poisson(mu) and may be zero.  Entangled-pair extras are fresh uniform
    honest states from ``state_set``; attenuated-pulse photons are all clones
    of ``prepared``.  Every delivered state is depolarized by the source
    visibility.
    """
    count = 1 if source.mu is None else sample_photon_count(source.mu, rng)
    if count == 0:
        return []
    first = _delivered(prepared.theta, source.visibility)
    if source.kind is SourceKind.ATTENUATED_PULSE:
        return [first] * count
    photons = [first]
    for _ in range(count - 1):
        x = 1 if rng.random() >= 0.5 else 0
        a = 1 if rng.random() >= 0.5 else 0
        photons.append(_delivered(state_set.honest(x, a).theta, source.visibility))
    return photons


def apply_loss(
    photons: list[CircleDensity], eta: float, rng: np.random.Generator
) -> list[CircleDensity]:
    """Each photon independently survives with probability eta (order kept)."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta!r}")
    return [p for p in photons if rng.random() < eta]
