"""Bundled example documents (instances, cones, point collections)."""

from importlib import resources


def read_text(name: str) -> str:
    return (resources.files(__name__) / name).read_text(encoding="utf-8")


def path(name: str):
    """Filesystem path of a bundled document (for CLI examples)."""
    return resources.files(__name__) / name
