"""Exception hierarchy shared across the package."""

from __future__ import annotations


class TridecompError(Exception):
    """Base class for all package errors."""


class GraphError(TridecompError):
    """Malformed graph or illegal graph operation."""


class MetricsError(TridecompError):
    """Density metrics undefined for the requested view (e.g. empty part)."""


class PartitionError(TridecompError):
    """No admissible ten-part split exists for this vertex count."""


class SteinerError(TridecompError):
    """Requested order is not congruent to 1 or 3 mod 6."""


class HallViolationError(TridecompError):
    """No perfect matching; carries a witness set S with |N(S)| < |S|."""

    def __init__(self, witness: set[int], neighborhood: set[int]):
        self.witness = witness
        self.neighborhood = neighborhood
        super().__init__(
            f"Hall violation: |S|={len(witness)} > |N(S)|={len(neighborhood)}"
        )


class PreconditionError(TridecompError):
    """A stage precondition failed; names the stage and violated inequality."""

    def __init__(self, stage: str, inequality: str, values: dict | None = None):
        self.stage = stage
        self.inequality = inequality
        self.values = dict(values or {})
        detail = ", ".join(f"{k}={v}" for k, v in self.values.items())
        super().__init__(f"[{stage}] precondition violated: {inequality}" + (f" ({detail})" if detail else ""))


class BoundViolationError(TridecompError):
    """A ledger inequality that must hold was violated at runtime."""

    def __init__(self, stage: str, name: str, detail: str = ""):
        self.stage = stage
        self.name = name
        super().__init__(f"[{stage}] bound violated: {name} {detail}".rstrip())


class TradeError(TridecompError):
    """Trade search or instantiation failed."""


class CandidateExhaustionError(TradeError):
    """No vertex available for an internal slot (density too low)."""

    def __init__(self, message: str, epsilon_hint: str = ""):
        self.epsilon_hint = epsilon_hint
        super().__init__(message + (f" ({epsilon_hint})" if epsilon_hint else ""))


class CompletionStuckError(TridecompError):
    """Latin-square completion gave up; carries the stuck partial state."""

    def __init__(self, stuck):
        self.stuck = stuck
        super().__init__("partial Latin square completion exhausted its budget")


class InstanceInfeasibleError(TridecompError):
    """Instance generator cannot satisfy the requested spec."""


class SizeCapError(TridecompError):
    """Brute-force oracle refused an input above its size cap."""


class ParseError(TridecompError):
    """Malformed input file; carries a 1-based line number."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")
