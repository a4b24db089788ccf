"""Exception hierarchy shared by all seqplan modules."""

from __future__ import annotations


class SeqPlanError(Exception):
    """Base class for every error raised by seqplan."""


# -- graphs -------------------------------------------------------------------


class GraphError(SeqPlanError, ValueError):
    pass


class CycleDetected(GraphError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cycle detected: " + " -> ".join(self.cycle))


class SelfLoop(CycleDetected):
    def __init__(self, node):
        super().__init__([node, node])
        self.node = node


class UnknownNode(GraphError):
    def __init__(self, node, where="diagram"):
        self.node = node
        super().__init__(f"unknown node {node!r} in {where}")


class DuplicateNode(GraphError):
    def __init__(self, node):
        self.node = node
        super().__init__(f"node {node!r} declared more than once")


class InvalidName(GraphError):
    def __init__(self, node):
        self.node = node
        super().__init__(f"invalid node name {node!r}: use ASCII letters, digits and '_'")


# -- regimes ------------------------------------------------------------------


class RegimeError(SeqPlanError, ValueError):
    pass


class InvalidRegime(RegimeError):
    pass


class LatentConditioning(RegimeError):
    pass


class CyclicStrategy(RegimeError):
    pass


class UnknownAction(RegimeError):
    pass


class IdleHasNoFactor(RegimeError):
    pass


class MissingConditioningValue(RegimeError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


# -- estimands ----------------------------------------------------------------


class EstimandError(SeqPlanError):
    pass


class MissingAssignment(EstimandError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnknownVariable(EstimandError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


# -- identification / oracle --------------------------------------------------


class NotACComponent(SeqPlanError, ValueError):
    pass


class LatentsPresent(SeqPlanError, ValueError):
    pass


class ModelError(SeqPlanError, ValueError):
    pass


class StateSpaceTooLarge(ModelError):
    pass


# -- text formats -------------------------------------------------------------


class ParseError(SeqPlanError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        self.message = message
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
