"""Working-precision configuration for rigorous computations.

All interval arithmetic in this package runs at an explicitly stated
number of significand bits.  Construction of quadrature rules typically
needs more precision than evaluation of the final bounds, so the two
defaults are kept separate and both are recorded in certificates.
"""

from __future__ import annotations

from dataclasses import dataclass

MIN_BITS = 53

DEFAULT_BUILD_BITS = 256
DEFAULT_VALIDATE_BITS = 128


@dataclass(frozen=True)
class PrecisionConfig:
    """Significand bits used in the two phases of a run.

    ``build`` is used when enclosing quadrature nodes/weights and basis
    evaluations; ``validate`` when evaluating the bound ledger.
    """

    build: int = DEFAULT_BUILD_BITS
    validate: int = DEFAULT_VALIDATE_BITS

    def __post_init__(self) -> None:
        if self.build < MIN_BITS or self.validate < MIN_BITS:
            raise ValueError(f"precision must be at least {MIN_BITS} bits")
