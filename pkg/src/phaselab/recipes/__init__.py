"""Bundled experiment recipes."""

from importlib import resources

NAMES = ("quadratic-equivalence", "free-shear", "quartic-oracle",
         "chaotic-break-time", "decoherence-restoration")


def recipe_text(name):
    """UTF-8 JSON text of a bundled recipe config."""
    if name not in NAMES:
        raise KeyError(f"unknown recipe {name!r}; bundled: {NAMES}")
    return resources.files(__package__).joinpath(f"{name}.json").read_text("utf-8")
