"""Inference cost estimate for a decoder-only transformer."""

from __future__ import annotations

from dataclasses import dataclass

# Qwen3-0.6B
DEFAULT_LAYERS = 28
DEFAULT_HIDDEN = 1024


@dataclass(frozen=True)
class CostParams:
    layers: float
    hidden: float
    input_tokens: float
    output_tokens: float

    def __post_init__(self) -> None:
        if self.layers <= 0 or self.hidden <= 0 or self.input_tokens <= 0:
            raise ValueError("layers, hidden and input_tokens must be positive")
        if self.output_tokens < 0:
            raise ValueError("output_tokens must be non-negative")


def estimate_cost(p: CostParams) -> float:
    """FLOPs: ``L*d*(N^2 + M*N + M^2) + L*d^2*(N + M)``.

    Integer inputs give an exact integer result.
    """
    L, d, N, M = p.layers, p.hidden, p.input_tokens, p.output_tokens
    return L * d * (N * N + M * N + M * M) + L * d * d * (N + M)


def cost(input_tokens: float, output_tokens: float, layers: float = DEFAULT_LAYERS, hidden: float = DEFAULT_HIDDEN) -> float:
    return estimate_cost(CostParams(layers, hidden, input_tokens, output_tokens))
