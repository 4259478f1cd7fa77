"""Bundled example models."""

from __future__ import annotations

from pathlib import Path

from clatool.errors import InputError
from clatool.model import SutModel
from clatool.parsers.model_file import load_model

CATALOG_DIR = Path(__file__).parent


def catalog_models() -> list[str]:
    return sorted(path.stem for path in CATALOG_DIR.glob("*.model"))


def catalog_path(name: str) -> Path:
    path = CATALOG_DIR / f"{name}.model"
    if not path.is_file():
        raise InputError(f"Unknown catalog model '{name}'. Available: {', '.join(catalog_models())}")
    return path


def load_catalog_model(name: str) -> SutModel:
    return load_model(catalog_path(name))


def resolve_model(reference: str) -> SutModel:
    """Load a model from a file path, or from the catalog by bare name."""
    path = Path(reference)
    if path.is_file() or path.suffix or "/" in reference:
        return load_model(path)
    return load_catalog_model(reference)
