"""
p-orthonormal basis pairs, stored through their transition matrix.

A pair is described by A with A[j, k] = f_j(omega_k) and its inverse B with
B[k, j] = g_k(tau_j). A vector x is carried by its f-coordinates theta_f x;
its g-coordinates are B @ theta_f x.
"""

import json
import logging
import math
import os
import warnings
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Optional, Sequence

import numpy as np
import numpy.typing as npt
from scipy.linalg import LinAlgWarning, dft, lu_factor, lu_solve
from scipy.linalg.lapack import get_lapack_funcs

from errors import (
    DimensionMismatchError,
    DomainError,
    InvalidPermutationError,
    MatrixParseError,
    PhaseError,
    SingularMatrixError,
)
from pnorm import CoefficientVector, HolderPair, as_coefficients, p_norm

logger = logging.getLogger(__name__)

DEFAULT_TRIALS = 100
DEFAULT_SEED = 0
ISOMETRY_RTOL = 1e-9
PHASE_TOL = 1e-12
MAX_CONDITION = 1e12
UNITARY_TOL = 1e-12


class IsometryStatus(str, Enum):
    VERIFIED = "verified"
    ASSUMED = "assumed"
    FAILED = "failed"


@dataclass(frozen=True, eq=False)
class BasisPair:
    """Two p-orthonormal bases of an n-dimensional space, via A and B = A^-1."""
    n: int
    holder: HolderPair
    A: np.ndarray
    B: np.ndarray
    mu_A: float
    mu_B: float
    isometry_status: IsometryStatus = IsometryStatus.ASSUMED

    @property
    def p(self) -> float:
        return self.holder.p

    @property
    def q(self) -> float:
        return self.holder.q

    @property
    def hypothesis_met(self) -> bool:
        return self.isometry_status is IsometryStatus.VERIFIED


@dataclass(frozen=True, eq=False)
class VectorInX:
    """A vector x of the space, represented by its f-coordinates theta_f x."""
    f_coords: CoefficientVector

    def __post_init__(self):
        object.__setattr__(self, "f_coords", _read_only(as_coefficients(self.f_coords)))

    @property
    def n(self) -> int:
        return int(self.f_coords.size)


@dataclass(frozen=True)
class IsometryCheck:
    status: IsometryStatus
    max_relative_error: float
    trials: int
    seed: int


def _read_only(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.complex128, copy=True)
    array.setflags(write=False)
    return array


def _check_dimension(n: Any) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"dimension must be a positive integer, got {n!r}")
    return int(n)


def coherence(pair: BasisPair) -> tuple[float, float]:
    """Return (mu_A, mu_B), the largest entry moduli of A and B."""
    return float(np.abs(pair.A).max()), float(np.abs(pair.B).max())


def _assemble(A: np.ndarray, B: np.ndarray, holder: HolderPair, status: IsometryStatus) -> BasisPair:
    A = _read_only(A)
    B = _read_only(B)
    mu_A = float(np.abs(A).max())
    mu_B = float(np.abs(B).max())
    if mu_A <= 0.0 or mu_B <= 0.0:
        raise SingularMatrixError("transition matrix has no nonzero entry")
    return BasisPair(
        n=int(A.shape[0]),
        holder=holder,
        A=A,
        B=B,
        mu_A=mu_A,
        mu_B=mu_B,
        isometry_status=status,
    )


def _lu_inverse(A: np.ndarray) -> np.ndarray:
    """
    Invert A through a partially pivoted LU factorization.

    Raises SingularMatrixError when the 1-norm condition estimate exceeds
    MAX_CONDITION.
    """
    n = A.shape[0]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(A)
    gecon, = get_lapack_funcs(("gecon",), (lu,))
    rcond, info = gecon(lu, np.linalg.norm(A, 1), norm="1")
    if info != 0 or not rcond > 0.0 or 1.0 / rcond > MAX_CONDITION:
        condition = math.inf if not rcond > 0.0 else 1.0 / rcond
        raise SingularMatrixError(f"condition estimate {condition:.3e} exceeds {MAX_CONDITION:.0e}")
    return lu_solve((lu, piv), np.eye(n, dtype=np.complex128))


def verify_isometry(
    pair: BasisPair,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
) -> IsometryCheck:
    """
    Check that z -> A z preserves the p-norm.

    Draws `trials` complex Gaussian vectors from a seeded generator, then adds
    one trial per coordinate vector e_k. The pair is verified when the largest
    relative error |‖Az‖_p - ‖z‖_p| / ‖z‖_p stays within 1e-9.
    """
    if isinstance(trials, bool) or trials < 1:
        raise DomainError(f"trials must be a positive integer, got {trials!r}")
    rng = np.random.default_rng(seed)
    shape = (int(trials), pair.n)
    samples = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    samples = np.vstack([samples, np.eye(pair.n, dtype=np.complex128)])

    worst = 0.0
    for z in samples:
        size = p_norm(z, pair.p)
        worst = max(worst, abs(p_norm(pair.A @ z, pair.p) - size) / size)

    status = IsometryStatus.VERIFIED if worst <= ISOMETRY_RTOL else IsometryStatus.FAILED
    if status is IsometryStatus.FAILED:
        logger.warning("pair is not an l^%g isometry (max relative error %.3e)", pair.p, worst)
    return IsometryCheck(status=status, max_relative_error=worst, trials=int(trials), seed=int(seed))


def pair_from_matrix(
    A: npt.ArrayLike,
    p: float,
    verify: bool = True,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
) -> BasisPair:
    """
    Build a pair from an arbitrary square transition matrix A.

    A unitary A (max |A^H A - I| <= 1e-12) gets B = A^H, the same inverse
    make_fourier_pair and make_generalized_permutation_pair build, so exported
    pairs reload unchanged. Any other A is inverted through LU.
    """
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise DimensionMismatchError(f"transition matrix must be square and non-empty, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise MatrixParseError("transition matrix has NaN or infinite entries")

    holder = HolderPair.from_p(p)
    adjoint = A.conj().T
    if np.abs(adjoint @ A - np.eye(A.shape[0])).max() <= UNITARY_TOL:
        B = adjoint
    else:
        B = _lu_inverse(A)
    pair = _assemble(A, B, holder, IsometryStatus.ASSUMED)
    if verify:
        check = verify_isometry(pair, trials, seed)
        pair = replace(pair, isometry_status=check.status)
    return pair


def make_fourier_pair(n: int) -> BasisPair:
    """
    Standard basis against the unitary Fourier basis of C^n (p = q = 2).

    A[j, k] = exp(-2 pi i j k / n) / sqrt(n) with 0-based j, k.
    """
    n = _check_dimension(n)
    A = dft(n, scale="sqrtn")
    return _assemble(A, A.conj().T, HolderPair.from_p(2.0), IsometryStatus.VERIFIED)


def make_generalized_permutation_pair(
    n: int,
    p: float,
    perm: Sequence[int],
    phases: Sequence[complex],
) -> BasisPair:
    """
    A phase-weighted permutation: A[perm(k), k] = phases[k].

    These are the invertible isometries of l^p for p != 2, so the pair is
    p-orthonormal by construction. perm is 1-based.
    """
    n = _check_dimension(n)
    perm = [int(k) for k in perm]
    if len(perm) != n or sorted(perm) != list(range(1, n + 1)):
        raise InvalidPermutationError(f"{perm} is not a permutation of 1..{n}")
    phases = np.asarray(phases, dtype=np.complex128)
    if phases.shape != (n,):
        raise DimensionMismatchError(f"expected {n} phases, got shape {phases.shape}")
    off = np.abs(np.abs(phases) - 1.0)
    if not np.all(off <= PHASE_TOL):
        bad = int(np.argmax(off)) + 1
        raise PhaseError(f"phase {bad} has modulus {abs(phases[bad - 1])!r}, expected 1")

    rows = np.asarray(perm) - 1
    cols = np.arange(n)
    A = np.zeros((n, n), dtype=np.complex128)
    A[rows, cols] = phases
    return _assemble(A, A.conj().T, HolderPair.from_p(p), IsometryStatus.VERIFIED)


def random_generalized_permutation_pair(n: int, p: float, seed: int = DEFAULT_SEED) -> BasisPair:
    """Seeded random permutation with uniformly distributed unimodular phases."""
    n = _check_dimension(n)
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n) + 1
    phases = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=n))
    return make_generalized_permutation_pair(n, p, perm.tolist(), phases)


def analysis_in_g(pair: BasisPair, x: VectorInX) -> CoefficientVector:
    """Return theta_g x = B @ theta_f x."""
    if x.n != pair.n:
        raise DimensionMismatchError(f"vector has {x.n} coordinates, pair has dimension {pair.n}")
    return pair.B @ x.f_coords


def synthesis_from_g(pair: BasisPair, g_coords: npt.ArrayLike) -> VectorInX:
    """Return the vector whose g-coordinates are g_coords (f = A @ g)."""
    g_coords = as_coefficients(g_coords)
    if g_coords.size != pair.n:
        raise DimensionMismatchError(f"vector has {g_coords.size} coordinates, pair has dimension {pair.n}")
    return VectorInX(pair.A @ g_coords)


# Matrix file format
def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _parse_complex(entry: Any, where: str) -> complex:
    if not isinstance(entry, list) or len(entry) != 2 or not all(_is_number(v) for v in entry):
        raise MatrixParseError(f"{where}: complex entries must be [re, im] number pairs, got {entry!r}")
    return complex(float(entry[0]), float(entry[1]))


def _parse_dimension(document: dict) -> int:
    n = document.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise MatrixParseError(f"field 'n' must be a positive integer, got {n!r}")
    return n


def _parse_exponent(document: dict) -> float:
    p = document.get("p")
    if not _is_number(p):
        raise MatrixParseError(f"field 'p' must be a number, got {p!r}")
    return float(p)


def _read_document(path: str | os.PathLike) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as e:
            raise MatrixParseError(f"{path}: not valid JSON ({e.msg} at line {e.lineno})") from e
        except UnicodeDecodeError as e:
            raise MatrixParseError(f"{path}: not UTF-8 text ({e.reason} at byte {e.start})") from e
    if not isinstance(document, dict):
        raise MatrixParseError(f"{path}: expected an object with fields n, p, ...")
    return document


def parse_matrix_document(document: dict) -> tuple[np.ndarray, float]:
    """
    Validate a matrix document {n, p, A} and return (A, p).

    A is an n-element array of n-element rows of [re, im] pairs, row-major.
    """
    n = _parse_dimension(document)
    p = _parse_exponent(document)
    rows = document.get("A")
    if not isinstance(rows, list) or not rows or not all(isinstance(row, list) for row in rows):
        raise MatrixParseError("field 'A' must be a non-empty array of rows")
    widths = {len(row) for row in rows}
    if len(widths) != 1:
        raise MatrixParseError(f"ragged rows in 'A' (row lengths {sorted(widths)})")
    if len(rows) != n or widths != {n}:
        raise DimensionMismatchError(f"'A' is {len(rows)}x{widths.pop()} but n = {n}")

    A = np.empty((n, n), dtype=np.complex128)
    for j, row in enumerate(rows):
        for k, entry in enumerate(row):
            A[j, k] = _parse_complex(entry, f"A[{j + 1}][{k + 1}]")
    return A, p


def load_pair(
    path: str | os.PathLike,
    p: Optional[float] = None,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
) -> BasisPair:
    """
    Load a transition matrix file and build a verified-or-flagged pair.

    p overrides the exponent stored in the file when given.
    """
    A, file_p = parse_matrix_document(_read_document(path))
    pair = pair_from_matrix(A, file_p if p is None else p, verify=True, trials=trials, seed=seed)
    logger.info("loaded %dx%d pair from %s (p=%g, %s)", pair.n, pair.n, path, pair.p, pair.isometry_status.value)
    return pair


def load_genperm_spec(path: str | os.PathLike, p: Optional[float] = None) -> BasisPair:
    """Load {n, p, perm, phases} and build the generalized permutation pair."""
    document = _read_document(path)
    n = _parse_dimension(document)
    file_p = _parse_exponent(document)
    perm = document.get("perm")
    phases = document.get("phases")
    if not isinstance(perm, list) or not all(isinstance(k, int) and not isinstance(k, bool) for k in perm):
        raise MatrixParseError("field 'perm' must be an array of integers")
    if not isinstance(phases, list):
        raise MatrixParseError("field 'phases' must be an array of [re, im] pairs")
    values = [_parse_complex(entry, f"phases[{k + 1}]") for k, entry in enumerate(phases)]
    return make_generalized_permutation_pair(n, file_p if p is None else p, perm, values)


def pair_to_document(pair: BasisPair) -> dict:
    """Serialize a pair's transition matrix in the matrix file format."""
    return {
        "n": pair.n,
        "p": pair.p,
        "A": [[[float(a.real), float(a.imag)] for a in row] for row in pair.A],
    }


def save_pair(pair: BasisPair, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(pair_to_document(pair), f, indent=2)
        f.write("\n")
