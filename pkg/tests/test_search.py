"""
Unit tests for tightness witnesses.
Tests the picket fence, the seeded search and slack landscapes.
"""

import pytest
import sys
import os

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from basis import VectorInX, make_fourier_pair, make_generalized_permutation_pair, random_generalized_permutation_pair
from errors import DomainError, ZeroVectorError
from search import (
    DENSE,
    PICKET,
    SPARSE,
    picket_fence,
    product_grid,
    random_tightness_search,
    slack_landscape,
    strongest_witness,
    tightness_trials,
)


@pytest.mark.unit
class TestPicketFence:
    """Test suite for the Dirac comb."""

    @pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
    def test_equality(self, m):
        """Test zero slack with o(M) = o(N) = m."""
        witness = picket_fence(m)
        report = witness.report
        assert report.o_M == m and report.o_N == m
        assert abs(report.slack_ME) <= 1e-9
        assert abs(report.slack_ME2) <= 1e-9
        assert witness.family == PICKET and witness.trial is None

    def test_comb_layout(self):
        """Test that the comb sits on 1, m + 1, 2m + 1, ..."""
        witness = picket_fence(3)
        assert witness.report.M.to_list() == [1, 4, 7]
        assert np.count_nonzero(witness.x.f_coords) == 3

    def test_invalid_spacing(self):
        """Test that m must be a positive integer."""
        with pytest.raises(DomainError):
            picket_fence(0)
        with pytest.raises(DomainError):
            picket_fence(2.5)


@pytest.mark.unit
class TestTightnessSearch:
    """Test suite for the seeded random search."""

    def test_zero_slack_found_for_fourier(self):
        """Test that the search reaches equality o(M) o(N) = n."""
        witness = random_tightness_search(make_fourier_pair(6), 0.0, 0.0, trials=20, seed=0)
        assert witness.report.slack_ME == pytest.approx(0.0, abs=1e-9)
        assert witness.report.o_M * witness.report.o_N == 6
        assert witness.family == SPARSE

    def test_families_alternate(self):
        """Test even trials sparse and odd trials dense."""
        outcomes = tightness_trials(make_fourier_pair(4), 0.0, 0.0, trials=6, seed=1)
        assert [o.trial for o in outcomes] == list(range(6))
        assert [o.family for o in outcomes] == [SPARSE, DENSE] * 3

    def test_sparse_sizes_cycle(self):
        """Test that sparse candidates have 1, 2, ... nonzero entries."""
        outcomes = tightness_trials(make_fourier_pair(3), 0.0, 0.0, trials=8, seed=2)
        sizes = [np.count_nonzero(o.x.f_coords) for o in outcomes if o.family == SPARSE]
        assert sizes == [1, 2, 3, 1]

    def test_deterministic(self):
        """Test that the same seed gives the same witness."""
        pair = random_generalized_permutation_pair(5, 3.0, seed=3)
        a = random_tightness_search(pair, 0.1, 0.2, trials=15, seed=4)
        b = random_tightness_search(pair, 0.1, 0.2, trials=15, seed=4)
        assert a.trial == b.trial
        assert np.array_equal(a.x.f_coords, b.x.f_coords)
        assert a.report == b.report

    def test_minimum_over_trials(self):
        """Test that the witness has the smallest slack."""
        pair = make_fourier_pair(5)
        outcomes = tightness_trials(pair, 0.1, 0.1, trials=12, seed=5)
        witness = strongest_witness(outcomes, 0.1, 0.1)
        assert witness.report.slack_ME == min(o.report.slack_ME for o in outcomes)
        assert (witness.eps, witness.delta) == (0.1, 0.1)

    def test_ties_go_to_first_trial(self):
        """Test that equal slacks keep the earliest trial."""
        pair = make_generalized_permutation_pair(3, 2.0, [1, 2, 3], [1, 1, 1])
        witness = random_tightness_search(pair, 0.0, 0.0, trials=10, seed=0)
        assert witness.trial == 0

    def test_trials_validated(self):
        """Test that trials must be positive."""
        with pytest.raises(DomainError):
            tightness_trials(make_fourier_pair(3), 0.0, 0.0, trials=0)

    def test_no_outcomes(self):
        """Test that an empty ranking is refused."""
        with pytest.raises(DomainError):
            strongest_witness([], 0.0, 0.0)


@pytest.mark.unit
class TestSlackLandscape:
    """Test suite for reports over an (eps, delta) grid."""

    def test_one_report_per_point(self):
        """Test grid order and levels."""
        grid = product_grid([0.0, 0.1], [0.0, 0.2, 0.3])
        assert grid == [(0.0, 0.0), (0.0, 0.2), (0.0, 0.3), (0.1, 0.0), (0.1, 0.2), (0.1, 0.3)]
        reports = slack_landscape(make_fourier_pair(4), VectorInX([1, 2, 3, 4]), grid)
        assert [(r.eps, r.delta) for r in reports] == grid
        assert all(r.holds for r in reports)

    def test_zero_vector(self):
        """Test ZeroVectorError."""
        with pytest.raises(ZeroVectorError):
            slack_landscape(make_fourier_pair(2), VectorInX([0, 0]), [(0.0, 0.0)])
