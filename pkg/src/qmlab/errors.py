"""Exception taxonomy shared by all qmlab modules."""


class QmlabError(Exception):
    """Base class for all qmlab errors."""


class InputError(QmlabError, ValueError):
    """Malformed input: bad letters, unparseable text, mismatched alphabets."""


class ConfigError(QmlabError, ValueError):
    """Invalid walk or experiment configuration."""


class PreconditionError(QmlabError):
    """An operation's precondition does not hold for the given arguments."""


class RefusalError(QmlabError):
    """An experiment refuses to run (e.g. no twisted triangle found)."""
