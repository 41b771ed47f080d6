"""
Both sides of the approximate support uncertainty inequalities and the projected
operators V = P_M A P_N and W = P_N B P_M whose norms squeeze them.

For supports M (of theta_f x) and N (of theta_g x) at levels eps and delta:

    o(M)^(1/p) o(N)^(1/q) >= max{1 - eps - delta, 0} / mu_A
    o(M)^(1/q) o(N)^(1/p) >= max{1 - eps - delta, 0} / mu_B
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
import numpy.typing as npt

from basis import BasisPair, DEFAULT_SEED, VectorInX, analysis_in_g
from errors import DimensionMismatchError, DomainError, ExponentError, IndexRangeError, ZeroVectorError
from pnorm import CoefficientVector, HolderPair, as_coefficients, p_norm, scaled_powers
from support import SupportSet, is_epsilon_supported, minimal_support

logger = logging.getLogger(__name__)

SLACK_TOL = 1e-12
CHAIN_TOL = 1e-9
DEFAULT_RESTARTS = 16
DEFAULT_ITERS = 200
CONVERGENCE_RTOL = 1e-10

GREEDY_MINIMAL = "greedy-minimal"
GIVEN = "given"


class OperatorKind(str, Enum):
    V = "V"
    W = "W"


@dataclass(frozen=True, eq=False)
class ProjectedOperator:
    """The transition matrix compressed to a row support and a column support."""
    matrix: np.ndarray
    row_support: SupportSet
    col_support: SupportSet
    kind: OperatorKind
    holder: HolderPair


@dataclass(frozen=True)
class VerificationReport:
    """One check of both inequalities for a vector and a pair of supports."""
    eps: float
    delta: float
    M: SupportSet
    N: SupportSet
    lhs_ME: float
    rhs_ME: float
    lhs_ME2: float
    rhs_ME2: float
    slack_ME: float
    slack_ME2: float
    holds: bool
    hypothesis_met: bool
    p: float
    mu_A: float
    mu_B: float
    support_rule: str = GREEDY_MINIMAL

    @property
    def o_M(self) -> int:
        return self.M.cardinality

    @property
    def o_N(self) -> int:
        return self.N.cardinality


@dataclass(frozen=True, eq=False)
class NormEstimate:
    value: float
    maximizer: CoefficientVector
    restarts: int
    iters: int
    seed: int


@dataclass(frozen=True, eq=False)
class ProofTrace:
    """The quantities each step of the proof bounds, measured on one vector."""
    V: ProjectedOperator
    W: ProjectedOperator
    target: float
    upper_V: float
    upper_W: float
    estimate_V: float
    estimate_W: float
    witness_V: float
    witness_W: float

    @property
    def upper_holds(self) -> bool:
        return (
            max(self.estimate_V, self.witness_V) <= self.upper_V + CHAIN_TOL
            and max(self.estimate_W, self.witness_W) <= self.upper_W + CHAIN_TOL
        )

    @property
    def lower_holds(self) -> bool:
        return self.witness_V >= self.target - CHAIN_TOL and self.witness_W >= self.target - CHAIN_TOL


def _check_levels(eps: float, delta: float) -> None:
    for name, value in (("eps", eps), ("delta", delta)):
        if not 0.0 <= value < 1.0:
            raise DomainError(f"{name} must lie in [0, 1), got {value!r}")


def _clamped_gap(eps: float, delta: float) -> float:
    return max(1.0 - eps - delta, 0.0)


def _positions(S: SupportSet, n: int) -> np.ndarray:
    if S.n != n:
        raise IndexRangeError(f"support is over {{1, ..., {S.n}}}, expected {{1, ..., {n}}}")
    return np.asarray(S.indices, dtype=np.intp) - 1


def canonical_projection(S: SupportSet, z: npt.ArrayLike) -> CoefficientVector:
    """P_S z: keep the entries indexed by S, zero the rest."""
    z = as_coefficients(z)
    if S.indices and S.indices[-1] > z.size:
        raise IndexRangeError(f"indices {S.to_list()} exceed vector length {z.size}")
    rows = np.asarray(S.indices, dtype=np.intp) - 1
    projected = np.zeros_like(z)
    projected[rows] = z[rows]
    return projected


def build_projected_operator(pair: BasisPair, M: SupportSet, N: SupportSet, kind: OperatorKind) -> ProjectedOperator:
    """
    V = P_M A P_N (rows M, columns N of A) or W = P_N B P_M (rows N, columns M of B).
    """
    kind = OperatorKind(kind)
    m_pos = _positions(M, pair.n)
    n_pos = _positions(N, pair.n)
    if kind is OperatorKind.V:
        source, rows, cols, row_support, col_support = pair.A, m_pos, n_pos, M, N
    else:
        source, rows, cols, row_support, col_support = pair.B, n_pos, m_pos, N, M

    matrix = np.zeros((pair.n, pair.n), dtype=np.complex128)
    block = np.ix_(rows, cols)
    matrix[block] = source[block]
    return ProjectedOperator(
        matrix=matrix,
        row_support=row_support,
        col_support=col_support,
        kind=kind,
        holder=pair.holder,
    )


def operator_norm_upper(pair: BasisPair, M: SupportSet, N: SupportSet, kind: OperatorKind) -> float:
    """
    Coherence-counting bound on ‖V‖ (mu_A o(M)^(1/p) o(N)^(1/q)) or on
    ‖W‖ (mu_B o(N)^(1/p) o(M)^(1/q)).
    """
    kind = OperatorKind(kind)
    o_M, o_N = float(M.cardinality), float(N.cardinality)
    if kind is OperatorKind.V:
        return pair.mu_A * o_M ** (1.0 / pair.p) * o_N ** (1.0 / pair.q)
    return pair.mu_B * o_N ** (1.0 / pair.p) * o_M ** (1.0 / pair.q)


def witness_lower_bound(op: ProjectedOperator, y: npt.ArrayLike) -> float:
    """‖op y‖_p / ‖y‖_p, a certified lower bound on the operator norm."""
    y = as_coefficients(y)
    if y.size != op.matrix.shape[1]:
        raise DimensionMismatchError(f"vector has {y.size} entries, operator acts on {op.matrix.shape[1]}")
    size = p_norm(y, op.holder.p)
    if size == 0.0:
        raise ZeroVectorError("witness vector must be nonzero")
    return p_norm(op.matrix @ y, op.holder.p) / size


def _duality_map(v: np.ndarray, r: float, r_conj: float) -> np.ndarray:
    """
    sign(v) |v|^(r-1), normalized to unit r_conj-norm: the norming functional of v in l^r.
    """
    magnitudes = np.abs(v)
    powers, scale = scaled_powers(magnitudes, r - 1.0)
    phases = np.zeros_like(v)
    nonzero = magnitudes > 0.0
    phases[nonzero] = v[nonzero] / magnitudes[nonzero]
    w = phases * powers
    return w / p_norm(w, r_conj)


def _power_iterate(
    T: np.ndarray,
    x: np.ndarray,
    holder: HolderPair,
    iters: int,
) -> tuple[float, np.ndarray]:
    p, q = holder.p, holder.q
    adjoint = T.conj().T
    best_value, best_x = 0.0, x
    previous = None
    for it in range(iters):
        y = T @ x
        value = p_norm(y, p)
        if value > best_value:
            best_value, best_x = value, x
        if value == 0.0:
            break
        if previous is not None and abs(value - previous) <= CONVERGENCE_RTOL * value:
            logger.debug("power iteration converged after %d steps (%.12g)", it, value)
            break
        previous = value
        z = adjoint @ _duality_map(y, p, q)
        if not np.any(z):
            break
        x = _duality_map(z, q, p)
    return best_value, best_x


def search_p_operator_norm(
    op: ProjectedOperator,
    restarts: int = DEFAULT_RESTARTS,
    iters: int = DEFAULT_ITERS,
    seed: int = DEFAULT_SEED,
) -> NormEstimate:
    """
    Heuristic lower estimate of ‖op‖_{p->p} by nonlinear power iteration.

    Each restart alternates x -> op^H J_p(op x) -> J_q(.), where J_r is the
    l^r duality map; for p = 2 this is the ordinary power method on op^H op.
    Restart 0 starts from the column of largest p-norm, the others from
    seeded complex Gaussian vectors. The returned value is attained by the
    returned maximizer, so it never exceeds the true norm.
    """
    if restarts < 1 or iters < 1:
        raise DomainError(f"restarts and iters must be positive, got {restarts}, {iters}")
    T = op.matrix
    n = T.shape[1]
    p = op.holder.p
    best_x = np.zeros(n, dtype=np.complex128)
    best_x[0] = 1.0
    if not np.any(T):
        return NormEstimate(0.0, best_x, restarts, iters, seed)

    rng = np.random.default_rng(seed)
    column_norms = [p_norm(T[:, k], p) for k in range(n)]
    best_value = -1.0
    for restart in range(restarts):
        if restart == 0:
            x = np.zeros(n, dtype=np.complex128)
            x[int(np.argmax(column_norms))] = 1.0
        else:
            x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            x = x / p_norm(x, p)
        value, x = _power_iterate(T, x, op.holder, iters)
        if value > best_value:
            best_value, best_x = value, x

    return NormEstimate(
        value=witness_lower_bound(op, best_x),
        maximizer=best_x,
        restarts=restarts,
        iters=iters,
        seed=seed,
    )


def estimate_p_operator_norm(
    op: ProjectedOperator,
    restarts: int = DEFAULT_RESTARTS,
    iters: int = DEFAULT_ITERS,
    seed: int = DEFAULT_SEED,
) -> float:
    return search_p_operator_norm(op, restarts, iters, seed).value


def rhs_bounds(pair: BasisPair, eps: float, delta: float) -> tuple[float, float]:
    """Right-hand sides max{1-eps-delta, 0}/mu_A and max{1-eps-delta, 0}/mu_B."""
    _check_levels(eps, delta)
    gap = _clamped_gap(eps, delta)
    return gap / pair.mu_A, gap / pair.mu_B


def corollary_bounds(pair: BasisPair, eps: float, delta: float) -> tuple[float, float]:
    """Unclamped right-hand sides, valid when eps + delta <= 1."""
    _check_levels(eps, delta)
    if eps + delta > 1.0:
        raise DomainError(f"eps + delta must not exceed 1, got {eps + delta!r}")
    gap = 1.0 - eps - delta
    return gap / pair.mu_A, gap / pair.mu_B


def exact_support_bounds(pair: BasisPair) -> tuple[float, float]:
    """Bounds for exact supports (eps = delta = 0): 1/mu_A and 1/mu_B."""
    return 1.0 / pair.mu_A, 1.0 / pair.mu_B


def check_supports(
    pair: BasisPair,
    x: VectorInX,
    M: SupportSet,
    N: SupportSet,
    eps: float,
    delta: float,
    support_rule: str = GIVEN,
) -> VerificationReport:
    """
    Evaluate both inequalities for caller-chosen supports.

    theta_f x must be eps-supported on M and theta_g x delta-supported on N.
    """
    _check_levels(eps, delta)
    a = x.f_coords
    b = analysis_in_g(pair, x)
    if not is_epsilon_supported(a, M, eps, pair.p):
        raise DomainError(f"theta_f x is not {eps}-supported on {M.to_list()}")
    if not is_epsilon_supported(b, N, delta, pair.p):
        raise DomainError(f"theta_g x is not {delta}-supported on {N.to_list()}")

    o_M, o_N = float(M.cardinality), float(N.cardinality)
    p, q = pair.p, pair.q
    lhs_ME = o_M ** (1.0 / p) * o_N ** (1.0 / q)
    lhs_ME2 = o_M ** (1.0 / q) * o_N ** (1.0 / p)
    rhs_ME, rhs_ME2 = rhs_bounds(pair, eps, delta)
    slack_ME = lhs_ME - rhs_ME
    slack_ME2 = lhs_ME2 - rhs_ME2
    return VerificationReport(
        eps=float(eps),
        delta=float(delta),
        M=M,
        N=N,
        lhs_ME=lhs_ME,
        rhs_ME=rhs_ME,
        lhs_ME2=lhs_ME2,
        rhs_ME2=rhs_ME2,
        slack_ME=slack_ME,
        slack_ME2=slack_ME2,
        holds=slack_ME >= -SLACK_TOL and slack_ME2 >= -SLACK_TOL,
        hypothesis_met=pair.hypothesis_met,
        p=p,
        mu_A=pair.mu_A,
        mu_B=pair.mu_B,
        support_rule=support_rule,
    )


def verify_uncertainty(pair: BasisPair, x: VectorInX, eps: float, delta: float) -> VerificationReport:
    """
    Check both inequalities for x on its greedy minimal supports.

    Pairs whose isometry check failed still get a report, flagged through
    hypothesis_met.
    """
    _check_levels(eps, delta)
    a = x.f_coords
    b = analysis_in_g(pair, x)
    M = minimal_support(a, eps, pair.p)
    N = minimal_support(b, delta, pair.p)
    report = check_supports(pair, x, M, N, eps, delta, support_rule=GREEDY_MINIMAL)
    if not report.holds and report.hypothesis_met:
        logger.warning("inequality violated on a verified pair: slack %.3e / %.3e", report.slack_ME, report.slack_ME2)
    return report


def hilbert_corollary_bound(pair: BasisPair, eps: float, delta: float) -> float:
    """
    o(M) o(N) >= max{1-eps-delta, 0}^2 / mu_A^2 for orthonormal bases (p = 2).

    For the Fourier pair this is n (1-eps-delta)^2.
    """
    if pair.p != 2.0:
        raise ExponentError(f"the Hilbert-space bound needs p = 2, pair has p = {pair.p}")
    _check_levels(eps, delta)
    return _clamped_gap(eps, delta) ** 2 / pair.mu_A ** 2


def trace_proof(
    pair: BasisPair,
    x: VectorInX,
    eps: float,
    delta: float,
    report: Optional[VerificationReport] = None,
    restarts: int = DEFAULT_RESTARTS,
    iters: int = DEFAULT_ITERS,
    seed: int = DEFAULT_SEED,
) -> ProofTrace:
    """Measure every link of the proof chain on x and the report's supports."""
    if report is None:
        report = verify_uncertainty(pair, x, eps, delta)
    V = build_projected_operator(pair, report.M, report.N, OperatorKind.V)
    W = build_projected_operator(pair, report.M, report.N, OperatorKind.W)
    return ProofTrace(
        V=V,
        W=W,
        target=_clamped_gap(eps, delta),
        upper_V=operator_norm_upper(pair, report.M, report.N, OperatorKind.V),
        upper_W=operator_norm_upper(pair, report.M, report.N, OperatorKind.W),
        estimate_V=estimate_p_operator_norm(V, restarts, iters, seed),
        estimate_W=estimate_p_operator_norm(W, restarts, iters, seed),
        witness_V=witness_lower_bound(V, analysis_in_g(pair, x)),
        witness_W=witness_lower_bound(W, x.f_coords),
    )
