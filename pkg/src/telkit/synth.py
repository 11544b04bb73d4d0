"""Seeded synthetic tensor datasets with per-class low-rank structure.

Each class gets its own random orthonormal factor matrices and a base
core tensor; a sample is the reconstruction of a slightly perturbed core
plus elementwise Gaussian noise.  Cores are scaled so the clean samples
have unit-RMS entries, which makes ``noise_std`` directly comparable
across shapes and ranks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .ensemble import LabeledTensorDataset
from .seeding import mix_seed
from .tensor import DenseTensor, mode_n_product

__all__ = ["SyntheticSpec", "synth_generate", "BENCHMARK_SPEC"]

CORE_JITTER = 0.5  # per-sample core perturbation, relative to core scale


@dataclass(frozen=True)
class SyntheticSpec:
    shape: tuple[int, ...]
    classes: int
    rank: tuple[int, ...]
    samples_per_class: int
    noise_std: float
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(int(s) for s in self.shape))
        object.__setattr__(self, "rank", tuple(int(r) for r in self.rank))
        if any(s < 1 for s in self.shape):
            raise ValueError(f"invalid shape {self.shape}")
        if len(self.rank) != len(self.shape):
            raise ValueError(
                f"rank {self.rank} does not match shape {self.shape}"
            )
        if any(r < 1 for r in self.rank):
            raise ValueError(f"invalid rank {self.rank}")
        if any(r > s for r, s in zip(self.rank, self.shape)):
            raise ValueError(
                f"rank {self.rank} exceeds shape {self.shape}"
            )
        if self.classes < 1 or self.samples_per_class < 1:
            raise ValueError("classes and samples_per_class must be >= 1")
        if self.noise_std < 0:
            raise ValueError(f"noise_std must be >= 0, got {self.noise_std}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "shape": list(self.shape),
            "classes": self.classes,
            "rank": list(self.rank),
            "samples_per_class": self.samples_per_class,
            "noise_std": self.noise_std,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> "SyntheticSpec":
        return cls(
            shape=tuple(payload["shape"]),
            classes=int(payload["classes"]),
            rank=tuple(payload["rank"]),
            samples_per_class=int(payload["samples_per_class"]),
            noise_std=float(payload["noise_std"]),
            seed=int(payload["seed"]),
        )


# Desk-scale benchmark used by the experiment harness and the test suite.
BENCHMARK_SPEC = SyntheticSpec(
    shape=(8, 8, 3),
    classes=4,
    rank=(2, 2, 1),
    samples_per_class=40,
    noise_std=0.05,
    seed=7,
)


def _reconstruct_core(core: np.ndarray, factors: list[np.ndarray]) -> DenseTensor:
    result = DenseTensor.from_array(core)
    for n, factor in enumerate(factors):
        result = mode_n_product(result, factor, n)
    return result


def synth_generate(spec: SyntheticSpec) -> LabeledTensorDataset:
    """Deterministically generate the dataset described by ``spec``."""
    samples = []
    labels = []
    # unit-RMS scaling: E||core||^2 = prod(rank) spreads over prod(shape)
    scale = float(np.sqrt(np.prod(spec.shape) / np.prod(spec.rank)))
    for k in range(spec.classes):
        class_rng = np.random.default_rng(mix_seed(spec.seed, k))
        factors = []
        for size, r in zip(spec.shape, spec.rank):
            gaussian = class_rng.standard_normal((size, r))
            q, _ = np.linalg.qr(gaussian)
            factors.append(q[:, :r])
        base_core = scale * class_rng.standard_normal(spec.rank)
        for m in range(spec.samples_per_class):
            sample_rng = np.random.default_rng(mix_seed(spec.seed, k, m))
            jitter = CORE_JITTER * scale * sample_rng.standard_normal(spec.rank)
            clean = _reconstruct_core(base_core + jitter, factors)
            noise = spec.noise_std * sample_rng.standard_normal(spec.shape)
            samples.append(DenseTensor.from_array(clean.to_array() + noise))
            labels.append(k)
    return LabeledTensorDataset(samples, np.array(labels, dtype=np.int64))
