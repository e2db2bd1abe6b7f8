"""Deterministic, order-independent random substreams.

Every random quantity in a replication is drawn from its own
counter-based stream, keyed by hashing (seed, agent id, purpose tag).
Draws therefore never depend on iteration order or on how many draws
other agents made, which is what makes cross-algorithm comparisons under
a shared seed exact rather than statistical.
"""

from __future__ import annotations

import hashlib

import numpy as np

# purpose tags used by the engine
CAPTURE_COST = "capture_cost"
CAPTURE_FRACTION = "capture_fraction"
START_YEAR = "start_year"


def _digest(*parts) -> bytes:
    h = hashlib.sha256()
    for part in parts:
        raw = str(part).encode("utf-8")
        h.update(len(raw).to_bytes(4, "little"))
        h.update(raw)
    return h.digest()


def substream(seed: int, agent_id: str, purpose: str) -> np.random.Generator:
    """An independent generator for one (agent, purpose) pair."""
    digest = _digest("carbonflow", seed, agent_id, purpose)
    key = np.frombuffer(digest[:16], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def replication_seed(base_seed: int, index: int) -> int:
    """Derived 64-bit seed for replication ``index`` of a batch."""
    digest = _digest("replication", base_seed, index)
    return int.from_bytes(digest[:8], "little")
