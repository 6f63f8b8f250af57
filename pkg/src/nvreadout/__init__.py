"""Rate-equation modelling and analysis of cavity-enhanced NV spin read-out."""

from importlib import resources

from . import cavity, collection, errors, fitkit, levels, snr
from .series import Spectrum, TimeTrace

__version__ = "0.1.0"


def data_path(name):
    """Path of a shipped fixture file in ``nvreadout/data``."""
    return resources.files(__package__).joinpath("data", name)


__all__ = [
    "cavity",
    "collection",
    "errors",
    "fitkit",
    "levels",
    "snr",
    "Spectrum",
    "TimeTrace",
    "data_path",
]
