"""Exception types shared by the readers, the compiler and the CLI."""

from __future__ import annotations


class FormatError(ValueError):
    """A malformed line in one of the line-record file formats."""

    def __init__(self, message: str, line: int | None = None, source: str = "<string>"):
        self.message = message
        self.line = line
        self.source = source
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


class DanglingTokenRef(FormatError):
    def __init__(self, sentence: str, token_id: int, line: int | None = None, source: str = "<string>"):
        self.sentence = sentence
        self.token_id = token_id
        super().__init__(
            f"sentence {sentence!r} references unknown token {token_id}", line, source
        )


class ValidationError(ValueError):
    """Raised with every invariant violation found, not just the first."""

    def __init__(self, problems: list[str], source: str = "<string>"):
        self.problems = list(problems)
        self.source = source
        super().__init__(f"{source}: " + "; ".join(self.problems))


class DuplicateEntryError(ValidationError):
    pass


class DuplicateRuleError(ValueError):
    pass


class EmptyLexiconError(ValueError):
    pass


class UnknownSentence(KeyError):
    pass


class InconsistentInput(ValueError):
    """Assignments or annotations that do not belong to the index they are used with."""
