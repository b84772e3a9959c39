"""Exception hierarchy shared across the toolkit."""


class EmdAlignError(Exception):
    """Base class for all errors raised by emdalign."""


class ParseError(EmdAlignError):
    """A corpus, gold, or embedding file could not be parsed.

    Carries the offending path and 1-based line number when known.
    """

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:" if line is None else f"{path}:{line}: "
        super().__init__(prefix + message)


class ValidationError(EmdAlignError):
    """An input violates a documented invariant (bad pair, bad gold link, ...)."""


class ConfigError(EmdAlignError):
    """A parameter set violates its preconditions."""


class TrainingError(EmdAlignError):
    """Embedding training cannot proceed (e.g. empty vocabulary)."""


class OOVError(EmdAlignError):
    """A queried token is not in the embedding vocabulary."""

    def __init__(self, lang: str, surface: str):
        self.lang = lang
        self.surface = surface
        super().__init__(f"token {lang}:{surface} not in vocabulary")


class SolverError(EmdAlignError):
    """The LP solver failed or returned an infeasible/invalid plan."""
