class CasimError(Exception):
    """Base class for package errors."""


class ConfigError(CasimError):
    """Invalid or inconsistent scenario/network configuration."""


class ConstraintViolation(CasimError):
    """An allocation violated a model invariant; the message names it."""
