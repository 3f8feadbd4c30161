"""Layered-model test template generation for distributed systems."""
from importlib import resources

__version__ = "0.1.0"


def fixture_path(name: str = "webapp.dsut"):
    """Path to a fact file shipped with the package."""
    return resources.files("dsut") / "fixtures" / name
