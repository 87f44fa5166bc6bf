"""Exception hierarchy shared by every regulus module."""


class RegulusError(ValueError):
    """Base class for all domain errors raised by regulus."""


class InvalidName(RegulusError):
    pass


class TypeMismatch(RegulusError):
    pass


class SupportViolation(RegulusError):
    pass


class IndexOutOfRange(RegulusError):
    pass


class ObjectMismatch(RegulusError):
    pass


class IllTypedBlock(RegulusError):
    pass


class NotAPartition(RegulusError):
    pass


class UnknownPort(RegulusError):
    pass


class SlotOutOfRange(RegulusError):
    pass


class ArityMismatch(RegulusError):
    pass


class ContextMismatch(RegulusError):
    pass


class RuleInapplicable(RegulusError):
    pass


class NotARelation(RegulusError):
    pass


class NotAFunction(RegulusError):
    pass


class NotEnumerable(RegulusError):
    pass


class InvalidMorphism(RegulusError):
    pass


class UnnamedLeaf(RegulusError):
    pass


class VocabularyMismatch(RegulusError):
    pass


class MissingCarrier(RegulusError):
    pass


class InvalidPredicate(RegulusError):
    pass


class InconsistentCalculus(RegulusError):
    """Two characterizations that must agree gave different answers."""


class ResolutionError(RegulusError):
    pass


class ProgramSyntaxError(RegulusError):
    """Malformed program text, with a 1-based source position."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column
