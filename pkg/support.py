"""
Approximate supports of coefficient vectors.

A vector a is eps-supported on M (w.r.t. the p-norm) when the part of a
outside M carries at most an eps fraction of its p-norm. Index sets are
1-based throughout.
"""

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np
import numpy.typing as npt

from errors import DimensionMismatchError, DomainError, IndexRangeError, ZeroVectorError
from pnorm import as_coefficients, p_norm, restricted_p_norm, scaled_powers

EPS_TOL = 1e-12


@dataclass(frozen=True)
class SupportSet:
    """A sorted subset M of {1, ..., n}; o(M) is its cardinality."""
    indices: tuple[int, ...]
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"ambient dimension must be positive, got {self.n}")
        if list(self.indices) != sorted(set(self.indices)):
            raise IndexRangeError(f"indices must be sorted and distinct, got {self.indices}")
        if self.indices and (self.indices[0] < 1 or self.indices[-1] > self.n):
            raise IndexRangeError(f"indices {list(self.indices)} are not a subset of {{1, ..., {self.n}}}")

    @classmethod
    def of(cls, indices: Iterable[int], n: int) -> "SupportSet":
        picked = [int(j) for j in indices]
        if len(set(picked)) != len(picked):
            raise IndexRangeError(f"duplicate indices in {picked}")
        return cls(indices=tuple(sorted(picked)), n=int(n))

    @classmethod
    def full(cls, n: int) -> "SupportSet":
        return cls(indices=tuple(range(1, n + 1)), n=int(n))

    @classmethod
    def empty(cls, n: int) -> "SupportSet":
        return cls(indices=(), n=int(n))

    @property
    def cardinality(self) -> int:
        return len(self.indices)

    @property
    def mask(self) -> np.ndarray:
        """Boolean mask over the 0-based storage positions."""
        mask = np.zeros(self.n, dtype=bool)
        mask[np.asarray(self.indices, dtype=np.intp) - 1] = True
        return mask

    def complement(self) -> "SupportSet":
        chosen = set(self.indices)
        return SupportSet(indices=tuple(j for j in range(1, self.n + 1) if j not in chosen), n=self.n)

    def to_list(self) -> list[int]:
        return list(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, j: object) -> bool:
        return j in self.indices


def _check_level(name: str, value: float) -> None:
    if not 0.0 <= value < 1.0:
        raise DomainError(f"{name} must lie in [0, 1), got {value!r}")


def _nonzero(a: npt.ArrayLike) -> np.ndarray:
    a = as_coefficients(a)
    if not np.any(a):
        raise ZeroVectorError("approximate supports are only defined for nonzero vectors")
    return a


def _matching(a: np.ndarray, M: SupportSet) -> None:
    if M.n != a.size:
        raise DimensionMismatchError(f"support lives in dimension {M.n}, vector has {a.size} entries")


def epsilon_of_support(a: npt.ArrayLike, M: SupportSet, p: float) -> float:
    """Smallest eps for which a is eps-supported on M: ‖a|M^c‖_p / ‖a‖_p."""
    a = _nonzero(a)
    _matching(a, M)
    return restricted_p_norm(a, M.complement(), p) / p_norm(a, p)


def is_epsilon_supported(a: npt.ArrayLike, M: SupportSet, eps: float, p: float) -> bool:
    """True when the tail of a outside M is at most eps of its p-norm (1e-12 slack)."""
    _check_level("eps", eps)
    return epsilon_of_support(a, M, p) <= eps + EPS_TOL


def minimal_support(a: npt.ArrayLike, eps: float, p: float) -> SupportSet:
    """
    Smallest M on which a is eps-supported.

    Entries are ranked by modulus, largest first, ties by ascending index;
    the shortest prefix whose complement passes the eps test is returned.
    Dropping the largest entries minimizes the tail, so the prefix has
    minimum cardinality among all eps-supports.
    """
    _check_level("eps", eps)
    a = _nonzero(a)
    n = a.size
    magnitudes = np.abs(a)
    order = np.argsort(-magnitudes, kind="stable")

    # tails[k] is the scaled p-th power of the tail left by the first k entries
    powers, _ = scaled_powers(magnitudes[order], p)
    tails = np.concatenate([np.cumsum(powers[::-1])[::-1], [0.0]])
    ratios = (tails / tails[0]) ** (1.0 / p)
    passing = np.flatnonzero(ratios <= eps + EPS_TOL)
    k = int(passing[0]) if passing.size else n

    def prefix(size: int) -> SupportSet:
        return SupportSet.of((order[:size] + 1).tolist(), n)

    # result must agree with is_epsilon_supported
    while k > 0 and is_epsilon_supported(a, prefix(k - 1), eps, p):
        k -= 1
    while k < n and not is_epsilon_supported(a, prefix(k), eps, p):
        k += 1
    return prefix(k)


def support_profile(a: npt.ArrayLike, p: float, grid: Sequence[float]) -> list[tuple[float, int]]:
    """Minimal support size for each eps of an increasing grid."""
    grid = [float(e) for e in grid]
    for e in grid:
        _check_level("eps", e)
    if any(later < earlier for earlier, later in zip(grid, grid[1:])):
        raise DomainError(f"eps grid must be increasing, got {grid}")
    a = _nonzero(a)
    return [(e, minimal_support(a, e, p).cardinality) for e in grid]
