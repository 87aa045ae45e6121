"""Exception hierarchy shared by every service"""
from typing import Optional


class CheckerError(ValueError):
    """Base class for all checker failures"""


# Graphs

class GraphError(CheckerError):
    """Invalid graph or graph operation"""


class InvalidGraph(GraphError):
    pass


class InvalidArity(GraphError):
    pass


class NotSurjective(GraphError):
    pass


class IndexOutOfRange(GraphError):
    pass


class TypeTooLarge(GraphError):
    pass


class LoopCreated(GraphError):
    """An operation would put a vertex twice into one edge of a loop-free graph"""


class UnknownId(GraphError):
    pass


class OrientationMismatch(GraphError):
    pass


class SizeLimitExceeded(CheckerError):
    """An exhaustive procedure was asked to run beyond its configured size"""


# Formulas

class FormulaError(CheckerError):
    pass


class FormulaSyntaxError(FormulaError):
    """Parse failure with a character offset into the source text"""

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class SortError(FormulaError):
    pass


class AssignmentIncomplete(FormulaError):
    pass


class BoundExceeded(CheckerError):
    """Formula metrics or an engine budget went over the configured limit"""


# Expressions

class ExpressionError(CheckerError):
    pass


class ExpressionSyntaxError(ExpressionError):

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class InvalidExpression(ExpressionError):
    pass


# Decompositions

class DecompositionError(CheckerError):
    pass


class DecompositionInvalid(DecompositionError):
    pass


class NotRooted(DecompositionError):
    pass


class NoneWithinBound(DecompositionError):
    """The search found no decomposition of the requested width (not a certificate)"""


class TerminalsNotCoBagged(DecompositionError):
    pass


class NotVerdant(DecompositionError):
    pass


class NotVerdurous(DecompositionError):
    pass


class JoinNodePresent(DecompositionError):
    pass


# Automata

class AutomatonError(CheckerError):
    pass


class MissingTransition(AutomatonError):
    pass


class ClosureBudgetExceeded(AutomatonError):
    pass
