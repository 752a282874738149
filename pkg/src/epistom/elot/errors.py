from __future__ import annotations


class ElotError(ValueError):
    """Base class for ELoT parse, type and lowering failures."""


class ElotSyntaxError(ElotError):
    def __init__(self, message: str, pos: int, expected: tuple[str, ...] = ()):
        self.pos = pos
        self.expected = expected
        detail = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"syntax error at position {pos}: {message}{detail}")


class ElotTypeError(ElotError):
    def __init__(self, message: str, node=None, expected=None, actual=None):
        self.node = node
        self.expected = expected
        self.actual = actual
        super().__init__(message)


class UnknownSymbolError(ElotTypeError):
    pass


class LoweringError(ElotError):
    pass
