"""Shared configuration types and input validation.

The capacity computations accept three hidden-layer activations.  The
quadratic and ReLU variants split the output weights into d/2 entries of
-1 followed by d/2 entries of +1, so they require an even width d >= 2;
the linear variant is weight-invariant and accepts any d >= 1.
"""

from __future__ import annotations

from dataclasses import dataclass

ACTIVATIONS = ("linear", "quad", "relu")

_ALIASES = {"linear": "linear", "lin": "linear", "quad": "quad",
            "quadratic": "quad", "relu": "relu"}


class DomainError(ValueError):
    """Raised when an (activation, d, method) combination is invalid."""


def normalize_activation(activation: str) -> str:
    key = str(activation).strip().lower()
    if key not in _ALIASES:
        raise DomainError(
            f"unknown activation {activation!r}; expected one of {ACTIVATIONS}")
    return _ALIASES[key]


def validate_width(activation: str, d: int) -> tuple[str, int]:
    """Check an (activation, d) pair, returning the canonical pair.

    Linear accepts any d >= 1.  Quadratic and ReLU need an even d >= 2 so
    the output weights can carry d/2 positive and d/2 negative entries;
    d = 1 for ReLU is rejected rather than guessed at, since there is no
    way to split a single output weight.
    """
    activation = normalize_activation(activation)
    if int(d) != d or d < 1:
        raise DomainError(f"width d must be a positive integer, got {d}")
    d = int(d)
    if activation == "linear":
        return activation, d
    if d % 2 != 0:
        reason = ("the output weight vector needs d/2 entries of +1 and d/2 "
                  "of -1, so d must be an even positive integer")
        if activation == "relu" and d == 1:
            raise DomainError(f"relu with d=1 is not defined: {reason}")
        raise DomainError(f"{activation} with d={d} is not supported: {reason}")
    return activation, d


@dataclass(frozen=True)
class NumericsConfig:
    """All tolerances, sample counts and seeds used by the solvers.

    quad_rel_tol       relative tolerance of the adaptive quadratures
    mc_samples         Monte Carlo budget for expectation estimates
    seed               base seed for every random stream
    root_tol           accepted |saddle value| at a capacity root
    optimizer_tol      argument tolerance of the 1D searches
    mc_chunk_size      samples per deterministic Monte Carlo chunk
    """

    quad_rel_tol: float = 1e-8
    mc_samples: int = 10_000_000
    seed: int = 42
    root_tol: float = 1e-3
    optimizer_tol: float = 1e-6
    mc_chunk_size: int = 1_000_000

    def __post_init__(self) -> None:
        if self.quad_rel_tol <= 0 or self.root_tol <= 0 or self.optimizer_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.mc_samples < 1 or self.mc_chunk_size < 1:
            raise ValueError("sample counts must be positive")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


DEFAULT_CONFIG = NumericsConfig()
