"""Exception types shared across the package."""

from __future__ import annotations


class QDiracError(Exception):
    """Base class for all package errors."""


class DimMismatch(QDiracError):
    def __init__(self, expected, got, position: str = ""):
        self.expected = expected
        self.got = got
        self.position = position
        msg = f"dimension mismatch: expected {expected}, got {got}"
        if position:
            msg += f" at {position}"
        super().__init__(msg)


class UnknownGate(QDiracError):
    pass


class ArityMismatch(QDiracError):
    pass


class UnboundAtom(QDiracError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound atom: {name}")


class NotAVector(QDiracError):
    pass


class NotSquare(QDiracError):
    pass


class NotAnOperator(QDiracError):
    pass


class NotInReducedShape(QDiracError):
    pass


class FuelExhausted(QDiracError):
    def __init__(self, budget: int):
        self.budget = budget
        super().__init__(f"rewrite fuel exhausted (budget {budget})")


class PatternMismatch(QDiracError):
    pass


class InvalidQubitIndex(QDiracError):
    pass


class NonInvertibleScalar(QDiracError):
    pass


class UnknownCase(QDiracError):
    pass


class ParseError(QDiracError):
    def __init__(self, message: str, line: int = 1, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")
