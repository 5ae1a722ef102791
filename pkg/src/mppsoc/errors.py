"""Common exception base for the toolkit.

Every module-specific error derives from MppSocError so callers (notably
the CLI) can map failures to exit codes without enumerating modules.
"""


class MppSocError(Exception):
    """Base class for all toolkit errors."""
