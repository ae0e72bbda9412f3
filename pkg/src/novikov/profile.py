"""Per-degree dimension records shared by the invariant-form and simplicial engines."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class BettiProfile:
    """Twisted Betti numbers b_0..b_n at one twist.

    The alternating sum of the dims must match the alternating sum of the
    cochain-space dimensions (index identity); enforced at construction.
    """

    dims: tuple
    twist: str
    mode: str  # "generic" or "specialized"
    cochain_dims: tuple = field(repr=False, default=None)

    def __post_init__(self):
        if self.cochain_dims is not None:
            lhs = sum((-1) ** k * b for k, b in enumerate(self.dims))
            rhs = sum((-1) ** k * c for k, c in enumerate(self.cochain_dims))
            if lhs != rhs:
                raise ValueError(
                    "index identity violated: alt sum %d vs cochain alt sum %d"
                    % (lhs, rhs))

    @property
    def euler(self) -> int:
        return sum((-1) ** k * b for k, b in enumerate(self.dims))

    def __getitem__(self, k):
        return self.dims[k]

    def __str__(self):
        return "(%s)" % ", ".join(str(b) for b in self.dims)
