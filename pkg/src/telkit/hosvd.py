"""Higher Order SVD with multilinear-rank truncation.

The decomposition of an order-N tensor X at rank (R_1, ..., R_N):

* factor n holds the leading R_n left singular vectors of the mode-n
  unfolding of X;
* the core is X multiplied by every factor transposed along its mode.

Requested ranks are clamped per mode to min(I_n, prod of the other
dimensions); the clamped tuple is reported as ``effective_rank``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import truncated_svd
from .tensor import DenseTensor, frobenius_norm, mode_n_product, unfold

__all__ = ["MultilinearRank", "HosvdFactors", "hosvd", "reconstruct", "rank_search"]

MultilinearRank = tuple[int, ...]


@dataclass(frozen=True)
class HosvdFactors:
    """Core tensor plus one orthonormal factor matrix per mode."""

    core: DenseTensor
    factors: list[np.ndarray]  # factor n is I_n x R_n
    effective_rank: MultilinearRank

    @property
    def order(self) -> int:
        return len(self.factors)

    @property
    def shape(self) -> tuple[int, ...]:
        """Shape of the tensor the factors reconstruct."""
        return tuple(f.shape[0] for f in self.factors)


def clamp_rank(rank: Sequence[int], shape: Sequence[int]) -> MultilinearRank:
    """Clamp each R_n to min(I_n, prod of the other dimensions)."""
    shape = tuple(shape)
    clamped = []
    for n, r in enumerate(rank):
        if r < 1:
            raise ValueError(f"rank entries must be >= 1, got {tuple(rank)}")
        others = int(np.prod(shape[:n] + shape[n + 1 :]))
        clamped.append(min(int(r), shape[n], others))
    return tuple(clamped)


def hosvd(x: DenseTensor, rank: Sequence[int]) -> HosvdFactors:
    """Decompose ``x`` at multilinear rank ``rank`` (clamped per mode)."""
    if len(rank) != x.order:
        raise ValueError(
            f"rank tuple has length {len(rank)} but tensor has order {x.order}"
        )
    if not np.all(np.isfinite(x.data)):
        raise ValueError("hosvd input contains non-finite entries")
    effective = clamp_rank(rank, x.shape)
    factors = [
        truncated_svd(unfold(x, n), effective[n]).U for n in range(x.order)
    ]
    core = x
    for n, factor in enumerate(factors):
        core = mode_n_product(core, factor.T, n)
    return HosvdFactors(core=core, factors=factors, effective_rank=effective)


def reconstruct(f: HosvdFactors) -> DenseTensor:
    """Multiply the core by every factor along its mode."""
    if f.core.order != len(f.factors):
        raise ValueError(
            f"core order {f.core.order} does not match "
            f"{len(f.factors)} factors"
        )
    for n, factor in enumerate(f.factors):
        if factor.shape[1] != f.core.shape[n]:
            raise ValueError(
                f"factor {n} has {factor.shape[1]} columns but core mode "
                f"{n} has size {f.core.shape[n]}"
            )
    result = f.core
    for n, factor in enumerate(f.factors):
        result = mode_n_product(result, factor, n)
    return result


def relative_error(x: DenseTensor, approx: DenseTensor) -> float:
    """||x - approx||_F / ||x||_F (0 for an all-zero x matched exactly)."""
    denom = frobenius_norm(x)
    diff = float(np.linalg.norm(x.data - approx.data))
    if denom == 0.0:
        return 0.0 if diff == 0.0 else float("inf")
    return diff / denom


def _mean_error(samples: Sequence[DenseTensor], rank: MultilinearRank) -> float:
    errors = [relative_error(x, reconstruct(hosvd(x, rank))) for x in samples]
    return float(np.mean(errors))


def _storage(rank: MultilinearRank, shape: tuple[int, ...]) -> int:
    return int(np.prod(rank)) + sum(i * r for i, r in zip(shape, rank))


def rank_search(
    samples: Sequence[DenseTensor], max_relative_error: float
) -> MultilinearRank:
    """Smallest rank tuple keeping mean reconstruction error in budget.

    Greedy coordinate descent from full rank: repeatedly decrement the
    mode whose decrement keeps the mean relative error lowest, stopping
    when any further decrement would exceed ``max_relative_error``.
    Ties between modes are broken by smaller storage cost
    (prod(R) + sum(I_n * R_n)), then by lower mode index.  With an
    unattainable threshold (e.g. 0) the full rank is returned.
    """
    if len(samples) == 0:
        raise ValueError("rank_search needs at least one sample")
    if not 0.0 <= max_relative_error < 1.0:
        raise ValueError(
            f"max_relative_error must be in [0, 1), got {max_relative_error}"
        )
    shape = samples[0].shape
    for x in samples:
        if x.shape != shape:
            raise ValueError(
                f"samples disagree in shape: {x.shape} vs {shape}"
            )
    current = clamp_rank(shape, shape)  # full rank, clamped
    while True:
        best = None  # (mean_error, storage, mode, candidate)
        for n in range(len(shape)):
            if current[n] <= 1:
                continue
            candidate = current[:n] + (current[n] - 1,) + current[n + 1 :]
            err = _mean_error(samples, candidate)
            if err > max_relative_error:
                continue
            key = (err, _storage(candidate, shape), n)
            if best is None or key < best[0]:
                best = (key, candidate)
        if best is None:
            return current
        current = best[1]
