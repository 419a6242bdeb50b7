"""
Exception hierarchy for the tree search suite

Library code raises these; the command line maps them to exit codes.
"""

from typing import Optional


class TreeSearchError(Exception):
    """Base class for all errors raised by this package"""


class InvalidTreeError(TreeSearchError):
    """Vertex/edge data does not form a valid weighted rooted tree"""


class UnknownVertexError(TreeSearchError):
    """A vertex id that does not exist in the tree"""

    def __init__(self, vertex: int):
        super().__init__(f"Unknown vertex id: {vertex}")
        self.vertex = vertex


class WeightOverflowError(TreeSearchError):
    """Total weight of an instance exceeds the unsigned 64-bit range"""


class InvalidStrategyError(TreeSearchError):
    """A move sequence is not a monotone connected partial search"""


class CompositionError(TreeSearchError):
    """Two partial strategies cannot be composed"""


class ResourceCapError(TreeSearchError):
    """An instance is too large for the requested exhaustive computation"""


class DegreeCapExceededError(ResourceCapError):
    """Maximum degree is above the configured permutation-enumeration cap"""

    def __init__(self, max_degree: int, cap: int, permutations: int):
        super().__init__(
            f"Maximum degree {max_degree} exceeds cap {cap} "
            f"({permutations} child permutations per vertex)"
        )
        self.max_degree = max_degree
        self.cap = cap
        self.permutations = permutations


class OracleCapExceededError(ResourceCapError):
    """Too many edges for the exhaustive tree oracles"""


class BruteForceCapExceededError(ResourceCapError):
    """Too many tasks for brute-force schedule enumeration"""


class InvalidInstanceError(TreeSearchError):
    """Scheduling or 3-partition instance violates its invariants"""


class InfeasibleScheduleError(TreeSearchError):
    """A feasible schedule was required but the given one is not"""


class ReductionInvariantError(TreeSearchError):
    """A property proved for the reductions failed to hold.

    Reaching this means the implementation is wrong, not the input.
    """


class InstanceFormatError(TreeSearchError):
    """An instance file could not be parsed"""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")
        self.field = field
        self.line = line
