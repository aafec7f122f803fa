"""Parsed document containers."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..algebra.scalars import QI


@dataclass
class StateSpec:
    """Moment-state description as written in a ``state { ... }`` block.

    Moment and covariance keys are normal-ordered words (tuples of ids).
    """

    reference: str
    time: QI | None = None
    degree: int | None = None
    hbar: QI | None = None
    values: list = field(default_factory=list)
    moments: list = field(default_factory=list)
    means: list = field(default_factory=list)
    covariance: list = field(default_factory=list)


@dataclass
class SourceDocument:
    signature: object
    constraints: dict = field(default_factory=dict)
    positions: dict = field(default_factory=dict)
    state: StateSpec | None = None
    task: dict | None = None

    def constraint(self, name=None):
        """Return the named constraint, or the only one when name is None."""
        if name is None:
            if len(self.constraints) != 1:
                raise KeyError("document must declare exactly one constraint")
            return next(iter(self.constraints.values()))
        return self.constraints[name]

    def __eq__(self, other):
        if not isinstance(other, SourceDocument):
            return NotImplemented
        return (self.signature == other.signature
                and self.constraints == other.constraints
                and self.state == other.state
                and self.task == other.task)
