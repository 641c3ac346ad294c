"""Deterministic seed derivation for independent random streams."""
from __future__ import annotations

import hashlib
import random

# Recorded in game metadata so files declare which generator produced them.
RNG_ALGORITHM = "mt19937-v1"


def derive_seed(master: int, *labels: object) -> int:
    """Stable 63-bit sub-seed for the stream named by ``labels``."""
    text = f"{master}:" + ":".join(str(x) for x in labels)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def stream(master: int, *labels: object) -> random.Random:
    return random.Random(derive_seed(master, *labels))
