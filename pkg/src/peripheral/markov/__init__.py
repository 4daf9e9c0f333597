"""Combinatorial fast path for classical Markov chains."""

from .accel import get_kernels, numba_enabled
from .chain import (
    ChainStructure,
    StochasticMatrix,
    bottom_scc_periods,
    classical_chain_capacity,
    embed_stochastic,
)

__all__ = [
    "ChainStructure",
    "StochasticMatrix",
    "bottom_scc_periods",
    "classical_chain_capacity",
    "embed_stochastic",
    "get_kernels",
    "numba_enabled",
]
