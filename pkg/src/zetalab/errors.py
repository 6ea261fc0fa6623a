"""Exception types shared across the package."""


class ZetalabError(Exception):
    """Base class for package errors."""


class DomainError(ZetalabError, ValueError):
    """An argument lies outside the operation's mathematical domain."""


class ConfigError(ZetalabError, ValueError):
    """A configuration is inconsistent or violates an accuracy/feasibility rule."""


class ResourceError(ZetalabError, RuntimeError):
    """A request exceeds a configured resource cap."""
