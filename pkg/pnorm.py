"""
Scalar and vector l^p arithmetic: conjugate exponents, p-norms and the
restricted norms used by approximate supports.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import numpy.typing as npt

from errors import DomainError, IndexRangeError

CoefficientVector = npt.NDArray[np.complex128]

# Open interval accepted for the Holder exponent
P_MIN = 1.0 + 1e-9
P_MAX = 1e9
CONJUGATE_RTOL = 1e-12


def conjugate_index(p: float) -> float:
  """
  Return the Holder conjugate q of p, i.e. 1/p + 1/q = 1.

  Args:
    p: Exponent in (1, inf)

  Returns:
    The conjugate exponent q = p / (p - 1)
  """
  if not math.isfinite(p) or not P_MIN < p < P_MAX:
    raise DomainError(f"exponent p must lie in (1, inf), got {p!r}")
  return p / (p - 1.0)


@dataclass(frozen=True)
class HolderPair:
  """An exponent p in (1, inf) together with its conjugate q."""
  p: float
  q: float

  def __post_init__(self):
    conjugate_index(self.p)
    if not math.isclose(1.0 / self.p + 1.0 / self.q, 1.0, rel_tol=CONJUGATE_RTOL):
      raise DomainError(f"q={self.q!r} is not the conjugate of p={self.p!r}")

  @classmethod
  def from_p(cls, p: float) -> "HolderPair":
    return cls(p=float(p), q=conjugate_index(float(p)))


def as_coefficients(values: Sequence[complex] | npt.ArrayLike) -> CoefficientVector:
  """Coerce values to a 1-D complex vector with n >= 1 finite entries."""
  v = np.asarray(values, dtype=np.complex128)
  if v.ndim != 1 or v.size == 0:
    raise DomainError(f"coefficient vector must be 1-D and non-empty, got shape {v.shape}")
  if not np.all(np.isfinite(v)):
    raise DomainError("coefficient vector has NaN or infinite entries")
  return v


def _check_norm_exponent(p: float) -> None:
  if not math.isfinite(p) or p < 1.0:
    raise DomainError(f"norm exponent must be finite and >= 1, got {p!r}")


def scaled_powers(magnitudes: np.ndarray, p: float) -> tuple[np.ndarray, float]:
  """
  Return (|a|/m)^p entrywise and the scale m = max |a|.

  Zeros are short-circuited to 0 so fractional powers never see log(0).
  """
  scale = float(magnitudes.max(initial=0.0))
  powers = np.zeros(magnitudes.shape, dtype=np.float64)
  if scale == 0.0:
    return powers, 0.0
  nonzero = magnitudes > 0.0
  powers[nonzero] = np.exp(p * np.log(magnitudes[nonzero] / scale))
  return powers, scale


def p_power_sum(v: npt.ArrayLike, p: float) -> float:
  """Return sum |v_j|^p without overflowing for large p."""
  _check_norm_exponent(p)
  powers, scale = scaled_powers(np.abs(as_coefficients(v)), p)
  if scale == 0.0:
    return 0.0
  return float(powers.sum()) * scale ** p


def p_norm(v: npt.ArrayLike, p: float) -> float:
  """
  Return the l^p norm (sum |v_j|^p)^(1/p).

  Args:
    v: Coefficient vector (real or complex)
    p: Exponent, p >= 1

  Returns:
    The norm; 0 exactly when v is the zero vector
  """
  _check_norm_exponent(p)
  powers, scale = scaled_powers(np.abs(as_coefficients(v)), p)
  if scale == 0.0:
    return 0.0
  return scale * float(powers.sum()) ** (1.0 / p)


def _zero_based(indices: Iterable[int], n: int) -> np.ndarray:
  picked = sorted({int(j) for j in indices})
  if picked and (picked[0] < 1 or picked[-1] > n):
    raise IndexRangeError(f"indices {picked} are not a subset of {{1, ..., {n}}}")
  return np.asarray(picked, dtype=np.intp) - 1


def restricted_p_norm(v: npt.ArrayLike, indices: Iterable[int], p: float) -> float:
  """
  Return (sum_{j in S} |v_j|^p)^(1/p) for a 1-based index set S.

  The empty set gives 0.
  """
  v = as_coefficients(v)
  rows = _zero_based(indices, v.size)
  if rows.size == 0:
    _check_norm_exponent(p)
    return 0.0
  return p_norm(v[rows], p)


def counting_bound(v: npt.ArrayLike, indices: Iterable[int], p: float) -> tuple[float, float]:
  """
  Both sides of the Holder counting step on S:
  (sum_S |v_j|)^p <= o(S)^(p/q) * sum_S |v_j|^p.
  """
  q = conjugate_index(p)
  v = as_coefficients(v)
  rows = _zero_based(indices, v.size)
  if rows.size == 0:
    return 0.0, 0.0
  selected = v[rows]
  lhs = float(np.abs(selected).sum()) ** p
  rhs = rows.size ** (p / q) * p_power_sum(selected, p)
  return lhs, rhs
