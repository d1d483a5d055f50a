"""Deterministic random streams derived from one 64-bit master seed.

Every simulation consumes four named, independent streams so that changing
one party's behavior never perturbs the draws seen by the others:

    alice    - Alice's choices (x, a, cheat index r, desired outcome)
    bob      - Bob's choices (basis bit y, announced b, desired outcome)
    physics  - measurement outcomes (one uniform draw per projective click)
    source   - photon-pair counts, extra-pair state picks, channel loss

Derivation is stable and documented: the child seed for stream ``name`` is
the first 8 bytes (little-endian) of SHA-256("<master>:<name>"), fed to a
PCG64 generator.  The same rule with names "cell:<i>" derives per-cell
seeds for parameter sweeps.
"""
from __future__ import annotations

import hashlib

import numpy as np

STREAM_NAMES = ("alice", "bob", "physics", "source")


def derive_seed(master_seed: int, name: str) -> int:
    """Derive a 64-bit child seed for a named stream."""
    digest = hashlib.sha256(f"{master_seed}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def stream(master_seed: int, name: str) -> np.random.Generator:
    """A fresh generator for the named stream of ``master_seed``."""
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed, name)))


def session_streams(master_seed: int) -> dict[str, np.random.Generator]:
    """All four protocol streams, keyed by name."""
    return {name: stream(master_seed, name) for name in STREAM_NAMES}
