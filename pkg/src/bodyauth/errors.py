class BodyauthError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class GeometryError(BodyauthError):
    """Ray/scene geometry is invalid, e.g. the ray misses the body."""


class ConfigError(BodyauthError):
    """Malformed configuration file; message carries line/key diagnostics."""


class FormatError(BodyauthError):
    """Malformed CSI CSV or profile document."""
