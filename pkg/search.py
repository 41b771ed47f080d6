"""
Tightness witnesses: vectors whose supports come close to equality in the
uncertainty inequalities.

The search reports empirical minima of the slack only. It does not decide
which pairs or supports attain equality.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from basis import DEFAULT_SEED, BasisPair, VectorInX, make_fourier_pair
from bounds import VerificationReport, verify_uncertainty
from errors import DomainError, ZeroVectorError

logger = logging.getLogger(__name__)

DEFAULT_SEARCH_TRIALS = 200

DENSE = "dense"
SPARSE = "sparse"
PICKET = "picket"


@dataclass(frozen=True, eq=False)
class Witness:
    x: VectorInX
    eps: float
    delta: float
    report: VerificationReport
    trial: Optional[int] = None
    family: str = PICKET


@dataclass(frozen=True, eq=False)
class TrialOutcome:
    trial: int
    family: str
    x: VectorInX
    report: VerificationReport


def picket_fence(m: int) -> Witness:
    """
    The comb of spacing m in dimension n = m^2 against the Fourier pair.

    Both the comb and its DFT have exactly m nonzero entries, so
    o(M) o(N) = n and the bound is met with equality at eps = delta = 0.
    """
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 1:
        raise DomainError(f"comb spacing must be a positive integer, got {m!r}")
    m = int(m)
    pair = make_fourier_pair(m * m)
    comb = np.zeros(m * m, dtype=np.complex128)
    comb[::m] = 1.0 / math.sqrt(m)
    x = VectorInX(comb)
    return Witness(x=x, eps=0.0, delta=0.0, report=verify_uncertainty(pair, x, 0.0, 0.0))


def _candidates(n: int, trials: int, seed: int) -> Iterator[tuple[int, str, np.ndarray]]:
    """
    Even trials are sparse (support sizes cycle 1, 2, ..., n; entries +-1 or
    random phases), odd trials are dense complex Gaussian vectors.
    """
    rng = np.random.default_rng(seed)
    sparse_seen = 0
    for trial in range(trials):
        if trial % 2 == 0:
            size = 1 + sparse_seen % n
            sparse_seen += 1
            support = rng.choice(n, size=size, replace=False)
            if rng.random() < 0.5:
                entries = rng.choice([-1.0, 1.0], size=size).astype(np.complex128)
            else:
                entries = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=size))
            f = np.zeros(n, dtype=np.complex128)
            f[support] = entries
            yield trial, SPARSE, f
        else:
            yield trial, DENSE, rng.standard_normal(n) + 1j * rng.standard_normal(n)


def tightness_trials(
    pair: BasisPair,
    eps: float,
    delta: float,
    trials: int = DEFAULT_SEARCH_TRIALS,
    seed: int = DEFAULT_SEED,
) -> list[TrialOutcome]:
    """Every candidate of the search with its report, in trial order."""
    if isinstance(trials, bool) or trials < 1:
        raise DomainError(f"trials must be a positive integer, got {trials!r}")
    outcomes = []
    for trial, family, f in _candidates(pair.n, int(trials), seed):
        x = VectorInX(f)
        outcomes.append(TrialOutcome(trial, family, x, verify_uncertainty(pair, x, eps, delta)))
    return outcomes


def strongest_witness(outcomes: Sequence[TrialOutcome], eps: float, delta: float) -> Witness:
    """Outcome with the smallest slack in the first inequality; ties go to the earliest trial."""
    if not outcomes:
        raise DomainError("no search outcomes to rank")
    best = outcomes[0]
    for outcome in outcomes[1:]:
        if outcome.report.slack_ME < best.report.slack_ME:
            best = outcome
    logger.info("best slack %.3e at trial %d (%s)", best.report.slack_ME, best.trial, best.family)
    return Witness(
        x=best.x,
        eps=float(eps),
        delta=float(delta),
        report=best.report,
        trial=best.trial,
        family=best.family,
    )


def random_tightness_search(
    pair: BasisPair,
    eps: float,
    delta: float,
    trials: int = DEFAULT_SEARCH_TRIALS,
    seed: int = DEFAULT_SEED,
) -> Witness:
    """Seeded search for the vector with the smallest slack in the first inequality."""
    return strongest_witness(tightness_trials(pair, eps, delta, trials, seed), eps, delta)


def slack_landscape(
    pair: BasisPair,
    x: VectorInX,
    grid: Sequence[tuple[float, float]],
) -> list[VerificationReport]:
    """One report per (eps, delta) grid point."""
    if not np.any(x.f_coords):
        raise ZeroVectorError("slack landscape needs a nonzero vector")
    return [verify_uncertainty(pair, x, eps, delta) for eps, delta in grid]


def product_grid(eps_values: Sequence[float], delta_values: Sequence[float]) -> list[tuple[float, float]]:
    return [(float(e), float(d)) for e in eps_values for d in delta_values]
