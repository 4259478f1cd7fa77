"""Seeding and file helpers."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

_SEED_MASK = (1 << 64) - 1


def seeded_rng(seed: int, *streams: int) -> np.random.Generator:
    """Generator for a 64-bit seed, optionally split into an independent stream."""
    return np.random.default_rng([seed & _SEED_MASK, *streams])


def write_text_atomic(path: Path, text: str) -> None:
    """Write text atomically: write to .tmp then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = path.parent / (path.name + ".tmp")
    tmp_path.write_text(text, encoding="utf-8")
    os.replace(str(tmp_path), str(path))
