"""Finite-dimensional von Neumann algebras ``M_{n_1} + ... + M_{n_K}`` and their elements."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidInputError
from .linalg import frozen, is_psd, spectral_norm


@dataclass(frozen=True)
class Algebra:
    """Ordered list of matrix-block sizes.

    The empty block list is reserved for the zero-dimensional algebra, which
    only appears as the endomorphism algebra of a zero bimodule.
    """

    blocks: tuple[int, ...]

    def __post_init__(self):
        try:
            blocks = tuple(int(n) for n in self.blocks)
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"block sizes must be integers: {self.blocks!r}") from exc
        if any(n < 1 for n in blocks):
            raise InvalidInputError(f"block sizes must be positive: {blocks}")
        object.__setattr__(self, "blocks", blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def dim(self) -> int:
        return sum(n * n for n in self.blocks)

    @property
    def is_zero(self) -> bool:
        return not self.blocks

    def basis(self) -> Iterator[tuple[int, int, int]]:
        """Matrix-unit labels ``(k, p, q)`` in the canonical order."""
        for k, n in enumerate(self.blocks):
            for p in range(n):
                for q in range(n):
                    yield k, p, q

    def offsets(self) -> list[int]:
        """Start index of each block within the flattened basis."""
        out, acc = [], 0
        for n in self.blocks:
            out.append(acc)
            acc += n * n
        return out

    def element(self, data) -> "AlgebraElement":
        return AlgebraElement(self, tuple(data))

    def unit(self) -> "AlgebraElement":
        return AlgebraElement(self, tuple(np.eye(n) for n in self.blocks))

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, tuple(np.zeros((n, n)) for n in self.blocks))

    def matrix_unit(self, k: int, p: int, q: int) -> "AlgebraElement":
        data = [np.zeros((n, n)) for n in self.blocks]
        data[k][p, q] = 1.0
        return AlgebraElement(self, tuple(data))

    def from_vector(self, vec: np.ndarray) -> "AlgebraElement":
        data, offs = [], self.offsets()
        for k, n in enumerate(self.blocks):
            data.append(np.asarray(vec[offs[k] : offs[k] + n * n]).reshape(n, n))
        return AlgebraElement(self, tuple(data))


ZERO_ALGEBRA = Algebra(())


def make_algebra(blocks: Sequence[int]) -> Algebra:
    blocks = tuple(blocks)
    if not blocks:
        raise InvalidInputError("an algebra needs at least one block")
    return Algebra(blocks)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    parent: Algebra
    data: tuple[np.ndarray, ...]

    def __post_init__(self):
        data = tuple(self.data)
        if len(data) != len(self.parent.blocks):
            raise InvalidInputError(
                f"expected {len(self.parent.blocks)} blocks, got {len(data)}"
            )
        fixed = []
        for n, block in zip(self.parent.blocks, data):
            block = np.asarray(block)
            if block.shape != (n, n):
                raise InvalidInputError(f"block of shape {block.shape}, expected {(n, n)}")
            fixed.append(frozen(block))
        object.__setattr__(self, "data", tuple(fixed))

    def _check(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement) or other.parent != self.parent:
            raise InvalidInputError("elements belong to different algebras")

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.parent, tuple(a + b for a, b in zip(self.data, other.data)))

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.parent, tuple(a - b for a, b in zip(self.data, other.data)))

    def __neg__(self):
        return AlgebraElement(self.parent, tuple(-a for a in self.data))

    def __mul__(self, scalar):
        return AlgebraElement(self.parent, tuple(scalar * a for a in self.data))

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check(other)
        return AlgebraElement(self.parent, tuple(a @ b for a, b in zip(self.data, other.data)))

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.parent, tuple(a.conj().T for a in self.data))

    @property
    def H(self) -> "AlgebraElement":
        return self.adjoint()

    def norm(self) -> float:
        """Operator norm: largest singular value over all blocks."""
        return max((spectral_norm(a) for a in self.data), default=0.0)

    def to_vector(self) -> np.ndarray:
        if not self.data:
            return np.zeros(0, dtype=np.complex128)
        return np.concatenate([a.reshape(-1) for a in self.data])

    def allclose(self, other: "AlgebraElement", atol: float = 1e-10) -> bool:
        self._check(other)
        return all(np.allclose(a, b, atol=atol, rtol=0) for a, b in zip(self.data, other.data))

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement) or other.parent != self.parent:
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.data, other.data))

    __hash__ = None


def unit(alg: Algebra) -> AlgebraElement:
    return alg.unit()


def add(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    return x + y


def scale(c: complex, x: AlgebraElement) -> AlgebraElement:
    return c * x


def multiply(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    return x @ y


def adjoint(x: AlgebraElement) -> AlgebraElement:
    return x.adjoint()


def norm(x: AlgebraElement) -> float:
    return x.norm()


def is_positive(x: AlgebraElement, tol: float = 1e-10) -> bool:
    return all(is_psd(a, tol) for a in x.data)
