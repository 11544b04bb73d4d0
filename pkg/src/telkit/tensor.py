"""Dense N-way tensors and the multilinear primitives built on them.

A :class:`DenseTensor` is an immutable real-valued array of order N >= 1
whose canonical linearization is column-major (the first index varies
fastest).  Mode-n unfolding follows the Kolda-Bader convention: the
columns of the unfolding are the mode-n fibers, enumerated so that the
lowest surviving index varies fastest.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DenseTensor",
    "unfold",
    "fold",
    "mode_n_product",
    "outer_product",
    "frobenius_norm",
]


class DenseTensor:
    """Immutable dense tensor with an explicit column-major layout.

    Parameters
    ----------
    shape : sequence of int
        Dimension sizes (I_1, ..., I_N); every entry must be >= 1.
    data : iterable of float
        The prod(shape) entries in column-major order, i.e. element
        (i_1, ..., i_N) sits at linear offset sum_n i_n * prod_{m<n} I_m.
    """

    __slots__ = ("_array",)

    def __init__(self, shape: Sequence[int], data: Iterable[float]):
        shape = tuple(int(s) for s in shape)
        if len(shape) < 1:
            raise ValueError("tensor order must be at least 1")
        if any(s < 1 for s in shape):
            raise ValueError(f"all dimensions must be >= 1, got {shape}")
        flat = np.asarray(data, dtype=np.float64).ravel()
        expected = int(np.prod(shape))
        if flat.size != expected:
            raise ValueError(
                f"data length {flat.size} does not match shape {shape} "
                f"(expected {expected})"
            )
        array = flat.reshape(shape, order="F")
        array.flags.writeable = False
        self._array = array

    @classmethod
    def from_array(cls, array: np.ndarray) -> "DenseTensor":
        """Build a tensor from an N-d array (values copied)."""
        array = np.asarray(array, dtype=np.float64)
        if array.ndim < 1:
            array = array.reshape(1)
        return cls(array.shape, array.ravel(order="F"))

    @property
    def shape(self) -> tuple[int, ...]:
        return self._array.shape

    @property
    def order(self) -> int:
        return self._array.ndim

    @property
    def size(self) -> int:
        return self._array.size

    @property
    def data(self) -> np.ndarray:
        """The entries as a flat column-major vector (read-only)."""
        flat = self._array.ravel(order="F")
        flat.flags.writeable = False
        return flat

    def to_array(self) -> np.ndarray:
        """The entries as a read-only N-d array."""
        return self._array

    def __getitem__(self, index) -> float:
        return float(self._array[index])

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(
            self._array, other._array
        )

    def __hash__(self):
        return hash((self.shape, self._array.tobytes()))

    def __repr__(self) -> str:
        return f"DenseTensor(shape={self.shape})"


def _require_mode(tensor: DenseTensor, mode: int) -> None:
    if not 0 <= mode < tensor.order:
        raise ValueError(
            f"mode {mode} out of range for order-{tensor.order} tensor"
        )


def unfold(tensor: DenseTensor, mode: int) -> np.ndarray:
    """Mode-n unfolding: stack the mode-``mode`` fibers as columns.

    The result has shape (I_mode, prod of the remaining dimensions);
    columns enumerate the fixed indices in column-major order.
    """
    _require_mode(tensor, mode)
    array = tensor.to_array()
    moved = np.moveaxis(array, mode, 0)
    return moved.reshape(array.shape[mode], -1, order="F")


def fold(matrix: np.ndarray, mode: int, shape: Sequence[int]) -> DenseTensor:
    """Inverse of :func:`unfold`: rebuild the tensor of ``shape``."""
    shape = tuple(int(s) for s in shape)
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError("fold expects a 2-d matrix")
    if not 0 <= mode < len(shape):
        raise ValueError(f"mode {mode} out of range for shape {shape}")
    rest = shape[:mode] + shape[mode + 1 :]
    if matrix.shape[0] != shape[mode] or matrix.shape[1] != int(np.prod(rest)):
        raise ValueError(
            f"matrix shape {matrix.shape} inconsistent with target shape "
            f"{shape} at mode {mode}"
        )
    moved = matrix.reshape((shape[mode],) + rest, order="F")
    return DenseTensor.from_array(np.moveaxis(moved, 0, mode))


def mode_n_product(
    tensor: DenseTensor, factor: np.ndarray, mode: int
) -> DenseTensor:
    """Multiply ``tensor`` by ``factor`` along ``mode``.

    Defined through the unfolded identity: the mode-n unfolding of the
    result equals ``factor @ unfold(tensor, mode)``.
    """
    _require_mode(tensor, mode)
    factor = np.asarray(factor, dtype=np.float64)
    if factor.ndim != 2:
        raise ValueError("factor must be a 2-d matrix")
    if factor.shape[1] != tensor.shape[mode]:
        raise ValueError(
            f"factor has {factor.shape[1]} columns but mode {mode} has "
            f"size {tensor.shape[mode]}"
        )
    result = factor @ unfold(tensor, mode)
    new_shape = list(tensor.shape)
    new_shape[mode] = factor.shape[0]
    return fold(result, mode, new_shape)


def outer_product(vectors: Sequence[np.ndarray]) -> DenseTensor:
    """Outer product of N vectors: a rank-1 tensor of order N."""
    if len(vectors) == 0:
        raise ValueError("outer_product needs at least one vector")
    arrays = [np.asarray(v, dtype=np.float64).ravel() for v in vectors]
    if any(a.size == 0 for a in arrays):
        raise ValueError("outer_product vectors must be nonempty")
    result = arrays[0]
    for vec in arrays[1:]:
        result = np.multiply.outer(result, vec)
    if result.ndim == 1:
        return DenseTensor((result.size,), result)
    return DenseTensor.from_array(result)


def frobenius_norm(tensor: DenseTensor) -> float:
    """Square root of the sum of squared entries."""
    return float(np.linalg.norm(tensor.data))
