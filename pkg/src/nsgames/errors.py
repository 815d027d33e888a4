"""Semantic exception hierarchy shared by all nsgames modules."""

from __future__ import annotations


class NsGamesError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(NsGamesError, ValueError):
    """Table dimensions or alphabet metadata do not line up."""


class DomainError(NsGamesError, ValueError):
    """An argument is outside its mathematical domain (range, normalization, ...)."""


class UnsupportedError(NsGamesError, ValueError):
    """The operation is well-posed but deliberately not supported in this regime."""


class ResourceLimitError(NsGamesError, RuntimeError):
    """A configurable size cap would be exceeded; the message names the required size."""
