"""
Random subcarrier selection (RSCS): which of the N OFDM subcarriers each
transmit antenna radiates on, and how that choice is refreshed over time.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np

from .core import SystemConfig, derive_rng

__all__ = ["SubcarrierSelection", "SelectionSchedule", "draw_selection",
           "uniform_selection", "schedule", "selection_to_csv"]

MODES = ("block", "symbol")


@dataclass(frozen=True)
class SubcarrierSelection:
    """Injective map from antenna n (0-based here) to subcarrier eta(n)."""

    indices: Tuple[int, ...]
    n_subcarriers: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if len(idx) == 0:
            raise ValueError("a selection needs at least one subcarrier")
        if len(set(idx)) != len(idx):
            raise ValueError("subcarrier indices must be distinct")
        if min(idx) < 0 or max(idx) >= self.n_subcarriers:
            raise ValueError(
                f"subcarrier indices must lie in [0, {self.n_subcarriers - 1}]")

    @property
    def eta(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.int64)

    @property
    def n_antennas(self) -> int:
        return len(self.indices)

    def __len__(self):
        return len(self.indices)

    def selection_matrix(self) -> np.ndarray:
        """N x N_T matrix E whose column m is the unit vector e_{eta(m)}."""
        E = np.zeros((self.n_subcarriers, self.n_antennas))
        E[self.eta, np.arange(self.n_antennas)] = 1.0
        return E


def draw_selection(cfg: SystemConfig, rng_seed) -> SubcarrierSelection:
    """Uniform N_T-subset of {0, ..., N-1}, assigned to antennas in draw order.

    ``rng_seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    if cfg.n_antennas > cfg.n_subcarriers:
        raise ValueError("cannot select more subcarriers than exist (N_T > N)")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else derive_rng(rng_seed)
    idx = rng.choice(cfg.n_subcarriers, size=cfg.n_antennas, replace=False)
    return SubcarrierSelection(tuple(idx.tolist()), cfg.n_subcarriers)


def uniform_selection(cfg: SystemConfig) -> SubcarrierSelection:
    """Evenly spaced indices eta(n) = n * floor(N / N_T); a deterministic oracle."""
    step = cfg.n_subcarriers // cfg.n_antennas
    return SubcarrierSelection(tuple(n * step for n in range(cfg.n_antennas)),
                               cfg.n_subcarriers)


@dataclass(frozen=True)
class SelectionSchedule:
    """Block-level or symbol-level RSCS pattern over ``n_symbols`` symbols.

    Selections are generated lazily; block ``b`` always uses the stream
    derived from ``(seed, b)``, so any block can be materialized on its own.
    """

    cfg: SystemConfig
    mode: str
    block_len: int
    n_symbols: int
    seed: int

    @property
    def n_blocks(self) -> int:
        return math.ceil(self.n_symbols / self.block_len)

    def block_of(self, symbol: int) -> int:
        if not 0 <= symbol < self.n_symbols:
            raise IndexError(symbol)
        return symbol // self.block_len

    def selection_for_block(self, block: int) -> SubcarrierSelection:
        if not 0 <= block < self.n_blocks:
            raise IndexError(block)
        return draw_selection(self.cfg, derive_rng(self.seed, block))

    def selection_for_symbol(self, symbol: int) -> SubcarrierSelection:
        return self.selection_for_block(self.block_of(symbol))

    def blocks(self) -> Iterator[Tuple[SubcarrierSelection, int]]:
        """Yield ``(selection, symbols_in_block)`` pairs."""
        for b in range(self.n_blocks):
            used = min(self.block_len, self.n_symbols - b * self.block_len)
            yield self.selection_for_block(b), used

    def __iter__(self) -> Iterator[SubcarrierSelection]:
        for sel, used in self.blocks():
            for _ in range(used):
                yield sel

    def __len__(self):
        return self.n_symbols


def schedule(cfg: SystemConfig, mode: str, block_len: int, n_symbols: int,
             seed: int) -> SelectionSchedule:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if n_symbols < 1:
        raise ValueError("n_symbols must be at least 1")
    if mode == "symbol":
        block_len = 1
    if block_len < 1:
        raise ValueError("block_len must be at least 1")
    return SelectionSchedule(cfg, mode, int(block_len), int(n_symbols), int(seed))


def selection_to_csv(selection: SubcarrierSelection, header: str = "") -> str:
    """CSV lines ``antenna_index,subcarrier_index`` (antennas numbered from 1)."""
    buf = io.StringIO()
    if header:
        buf.write(header if header.endswith("\n") else header + "\n")
    buf.write("antenna_index,subcarrier_index\n")
    for n, k in enumerate(selection.indices, start=1):
        buf.write(f"{n},{k}\n")
    return buf.getvalue()
