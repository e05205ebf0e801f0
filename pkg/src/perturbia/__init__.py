"""Perturbative quantum field theory toolkit."""

from .errors import (ConfigurationError, DomainError, NotASymmetry, NotConnectable, ParseError,
                     PerturbiaError, PoleOnRayError, ResolutionError, ResourceError)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "DomainError", "NotASymmetry", "NotConnectable", "ParseError",
    "PerturbiaError", "PoleOnRayError", "ResolutionError", "ResourceError",
]
