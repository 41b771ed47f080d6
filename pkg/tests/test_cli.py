"""
Integration tests for the command-line surface.
Tests documents, exit statuses and error reporting through click's runner.
"""

import io
import json
import pytest
import sys
import os

import pandas as pd
from click.testing import CliRunner

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import basis
import cli
from basis import random_generalized_permutation_pair, save_pair
from errors import DomainError

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))


def invoke(args, out=None):
    runner = CliRunner()
    if out is not None:
        args = list(args) + ["--out", str(out)]
    return runner.invoke(cli.main, args)


def document_at(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


@pytest.mark.unit
class TestValidators:
    """Test suite for the validate_* helpers."""

    def test_level_in_range(self):
        """Test a valid eps."""
        assert cli.validate_level("eps", 0.3) == (True, None)

    def test_level_out_of_range(self):
        """Test eps = 1 and negative delta."""
        ok, message = cli.validate_level("eps", 1.0)
        assert ok is False and "eps" in message
        assert cli.validate_level("delta", -0.1)[0] is False

    def test_positive(self):
        """Test positive integer checks."""
        assert cli.validate_positive("trials", 3) == (True, None)
        assert cli.validate_positive("trials", 0)[0] is False
        assert cli.validate_positive("m", None)[0] is False

    def test_pair_source(self):
        """Test the three pair source forms."""
        assert cli.validate_pair_source("fourier:8")[0] is True
        assert cli.validate_pair_source("genperm:spec.json")[0] is True
        assert cli.validate_pair_source("load:pair.json")[0] is True
        assert cli.validate_pair_source("fourier:x")[0] is False
        assert cli.validate_pair_source("hadamard:4")[0] is False
        assert cli.validate_pair_source(None)[0] is False


@pytest.mark.unit
class TestParsers:
    """Test suite for argument parsing."""

    def test_grid_with_both_levels(self):
        """Test 'e1,e2:d1,d2'."""
        assert cli.parse_grid("0,0.1:0.2,0.3") == ([0.0, 0.1], [0.2, 0.3])

    def test_grid_without_colon(self):
        """Test that one list is used for both levels."""
        assert cli.parse_grid("0,0.5") == ([0.0, 0.5], [0.0, 0.5])

    def test_grid_out_of_range(self):
        """Test that grid values must lie in [0, 1)."""
        with pytest.raises(DomainError):
            cli.parse_grid("0,1.2")

    def test_grid_garbage(self):
        """Test non-numeric grid values."""
        with pytest.raises(DomainError):
            cli.parse_grid("a,b")

    def test_vector(self):
        """Test complex literal entries."""
        assert cli.parse_vector("1, 0.5-1j,2j").tolist() == [1, 0.5 - 1j, 2j]

    def test_vector_garbage(self):
        """Test unreadable entries."""
        with pytest.raises(DomainError):
            cli.parse_vector("1,abc")


@pytest.mark.integration
class TestCommands:
    """Test suite for each command's document."""

    def test_coherence_fourier(self, tmp_path):
        """Test mu_A = 0.5 for the 4-point DFT."""
        out = tmp_path / "doc.json"
        result = invoke(["coherence", "--pair", "fourier:4"], out)
        assert result.exit_code == 0
        document = document_at(out)
        assert document["schema_version"] == "1"
        assert document["command"] == "coherence"
        assert document["seed"] == 0
        assert document["result"]["mu_A"] == pytest.approx(0.5)
        assert document["pair"]["isometry_status"] == "verified"
        assert document["pair"]["source"] == "fourier:4"

    def test_picket(self, tmp_path):
        """Test the m = 2 comb: zero slack, o(M) = o(N) = 2."""
        out = tmp_path / "doc.json"
        result = invoke(["picket", "--m", "2"], out)
        assert result.exit_code == 0
        report = document_at(out)["result"]["witness"]["report"]
        assert report["slack_ME"] == pytest.approx(0.0, abs=1e-9)
        assert report["o_M"] == 2 and report["o_N"] == 2
        assert document_at(out)["pair"]["n"] == 4

    def test_verify_with_vector(self, tmp_path):
        """Test a verify document for a given vector."""
        out = tmp_path / "doc.json"
        result = invoke(["verify", "--pair", "fourier:4", "--x", "1,0,0,0", "--eps", "0", "--delta", "0"], out)
        assert result.exit_code == 0
        document = document_at(out)["result"]
        assert document["report"]["M"] == [1]
        assert document["report"]["N"] == [1, 2, 3, 4]
        assert document["report"]["holds"] is True
        assert document["proof"]["upper_holds"] is True
        assert document["proof"]["lower_holds"] is True
        assert document["hilbert"]["o_M_o_N"] == 4
        assert document["x"][0] == [1.0, 0.0]

    def test_verify_on_loaded_pair(self, tmp_path):
        """Test the bundled matrix file."""
        out = tmp_path / "doc.json"
        result = invoke(["verify", "--pair", f"load:{os.path.join(ROOT, 'fourier4.json')}", "--eps", "0.1"], out)
        assert result.exit_code == 0
        assert document_at(out)["result"]["report"]["holds"] is True

    def test_genperm_source(self, tmp_path):
        """Test a generalized permutation spec file with p = 3."""
        out = tmp_path / "doc.json"
        result = invoke(["verify", "--pair", f"genperm:{os.path.join(ROOT, 'genperm3.json')}"], out)
        assert result.exit_code == 0
        document = document_at(out)
        assert document["pair"]["p"] == 3.0
        assert document["pair"]["q"] == pytest.approx(1.5)
        assert "hilbert" not in document["result"]

    def test_support_profile(self, tmp_path):
        """Test both sides over an eps grid."""
        out = tmp_path / "doc.json"
        result = invoke(["support", "--pair", "fourier:4", "--x", "1,0,0,0", "--grid", "0,0.5"], out)
        assert result.exit_code == 0
        document = document_at(out)["result"]
        assert [row["cardinality"] for row in document["f_profile"]] == [1, 1]
        assert document["g_profile"][0]["cardinality"] == 4

    def test_search(self, tmp_path):
        """Test the search witness document."""
        out = tmp_path / "doc.json"
        result = invoke(["search", "--pair", "fourier:4", "--trials", "10", "--seed", "3"], out)
        assert result.exit_code == 0
        document = document_at(out)
        assert document["seed"] == 3
        assert document["result"]["trials"] == 10
        assert document["result"]["witness"]["report"]["slack_ME"] == pytest.approx(0.0, abs=1e-9)

    def test_landscape(self, tmp_path):
        """Test one report per grid point."""
        out = tmp_path / "doc.json"
        result = invoke(["landscape", "--pair", "fourier:4", "--grid", "0,0.1:0,0.2,0.3"], out)
        assert result.exit_code == 0
        reports = document_at(out)["result"]["reports"]
        assert [(r["eps"], r["delta"]) for r in reports] == [
            (0.0, 0.0), (0.0, 0.2), (0.0, 0.3), (0.1, 0.0), (0.1, 0.2), (0.1, 0.3)
        ]

    def test_export(self, tmp_path):
        """Test that export writes the matrix file format."""
        out = tmp_path / "pair.json"
        result = invoke(["export", "--pair", "fourier:2"], out)
        assert result.exit_code == 0
        document = document_at(out)
        assert document["n"] == 2 and document["p"] == 2.0
        assert len(document["A"]) == 2

    def test_stdout_document(self):
        """Test that documents go to stdout without --out."""
        result = invoke(["coherence", "--pair", "fourier:2"])
        assert result.exit_code == 0
        assert '"schema_version": "1"' in result.output


@pytest.mark.integration
class TestCsvOutput:
    """Test suite for the flat CSV projection."""

    def test_search_rows_per_trial(self, tmp_path):
        """Test one row per trial."""
        out = tmp_path / "rows.csv"
        result = invoke(["search", "--pair", "fourier:4", "--trials", "7", "--format", "csv"], out)
        assert result.exit_code == 0
        frame = pd.read_csv(out)
        assert len(frame) == 7
        assert list(frame["trial"]) == list(range(7))
        for column in ("command", "seed", "family", "slack_ME", "slack_ME2", "o_M", "o_N"):
            assert column in frame.columns

    def test_landscape_rows_per_point(self, tmp_path):
        """Test one row per grid point."""
        out = tmp_path / "rows.csv"
        result = invoke(["landscape", "--pair", "fourier:4", "--grid", "0,0.2", "--format", "csv"], out)
        assert result.exit_code == 0
        assert len(pd.read_csv(out)) == 4

    def test_support_rows(self, tmp_path):
        """Test one row per side and level."""
        out = tmp_path / "rows.csv"
        result = invoke(["support", "--pair", "fourier:4", "--grid", "0,0.3,0.6", "--format", "csv"], out)
        assert result.exit_code == 0
        frame = pd.read_csv(out)
        assert sorted(set(frame["side"])) == ["f", "g"]
        assert len(frame) == 6

    def test_coherence_row(self):
        """Test a single row on stdout."""
        result = invoke(["coherence", "--pair", "fourier:4", "--format", "csv"])
        assert result.exit_code == 0
        frame = pd.read_csv(io.StringIO(result.output))
        assert len(frame) == 1
        assert frame["mu_A"][0] == pytest.approx(0.5)


@pytest.mark.integration
class TestExitStatus:
    """Test suite for error mapping."""

    def test_eps_out_of_range(self):
        """Test exit 1 and a domain error message for eps = 1.5."""
        result = invoke(["verify", "--pair", "fourier:4", "--eps", "1.5"])
        assert result.exit_code == 1
        assert "Domain error" in result.output

    def test_hypothesis_not_met(self, tmp_path):
        """Test exit 2 with the document still written."""
        out = tmp_path / "doc.json"
        result = invoke(["verify", "--pair", "fourier:4", "--p", "3"], out)
        assert result.exit_code == 2
        assert "Hypothesis not met" in result.output
        document = document_at(out)
        assert document["pair"]["isometry_status"] == "failed"
        assert document["result"]["report"]["hypothesis_met"] is False

    def test_missing_file(self, tmp_path):
        """Test exit 1 for an absent matrix file."""
        result = invoke(["coherence", "--pair", f"load:{tmp_path / 'absent.json'}"])
        assert result.exit_code == 1
        assert "File error" in result.output

    def test_parse_error(self, tmp_path):
        """Test exit 1 for malformed JSON."""
        path = tmp_path / "broken.json"
        path.write_text("[1, 2", encoding="utf-8")
        result = invoke(["coherence", "--pair", f"load:{path}"])
        assert result.exit_code == 1
        assert "Parse error" in result.output

    def test_undecodable_file(self, tmp_path):
        """Test exit 1 for a matrix file that is not UTF-8."""
        path = tmp_path / "latin.json"
        path.write_bytes(b'{"n": 2, "p": 2, "A": "\xe9"}')
        result = invoke(["coherence", "--pair", f"load:{path}"])
        assert result.exit_code == 1
        assert "Parse error" in result.output

    def test_dimension_mismatch(self):
        """Test exit 1 when --x has the wrong length."""
        result = invoke(["verify", "--pair", "fourier:4", "--x", "1,2"])
        assert result.exit_code == 1
        assert "Dimension mismatch" in result.output

    def test_zero_vector(self):
        """Test exit 1 for x = 0."""
        result = invoke(["verify", "--pair", "fourier:3", "--x", "0,0,0"])
        assert result.exit_code == 1
        assert "Zero vector" in result.output

    def test_missing_pair(self):
        """Test that --pair is required outside picket."""
        result = invoke(["coherence"])
        assert result.exit_code == 1

    def test_write_failure(self, mocker, tmp_path):
        """Test that OSError while writing is reported."""
        mocker.patch("cli.write_output", side_effect=OSError("disk full"))
        result = invoke(["coherence", "--pair", "fourier:2"])
        assert result.exit_code == 1
        assert "disk full" in result.output

    def test_usage_error_via_entrypoint(self, capsys):
        """Test that click usage errors exit 1, not 2."""
        assert cli.entrypoint(["no-such-command"]) == 1
        assert cli.entrypoint(["verify", "--eps", "not-a-number"]) == 1

    def test_entrypoint_success(self, tmp_path, capsys):
        """Test the plain entrypoint."""
        out = tmp_path / "doc.json"
        assert cli.entrypoint(["coherence", "--pair", "fourier:3", "--out", str(out)]) == 0
        assert document_at(out)["pair"]["n"] == 3


@pytest.mark.integration
class TestReproducibility:
    """Test suite for deterministic documents."""

    def test_identical_runs(self, tmp_path):
        """Test that the same config gives byte-identical output."""
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        args = ["search", "--pair", "fourier:5", "--trials", "12", "--seed", "7", "--eps", "0.1"]
        assert invoke(args, first).exit_code == 0
        assert invoke(args, second).exit_code == 0
        assert first.read_bytes() == second.read_bytes()

    def test_default_vector_is_seeded(self, tmp_path):
        """Test that the sampled vector depends only on the seed."""
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        invoke(["verify", "--pair", "fourier:4", "--seed", "5"], first)
        invoke(["verify", "--pair", "fourier:4", "--seed", "5"], second)
        assert document_at(first)["result"]["x"] == document_at(second)["result"]["x"]

    def test_saved_pair_loads_through_cli(self, tmp_path):
        """Test that save_pair output is accepted by load:."""
        path = tmp_path / "pair.json"
        save_pair(random_generalized_permutation_pair(4, 1.5, seed=2), path)
        out = tmp_path / "doc.json"
        result = invoke(["coherence", "--pair", f"load:{path}"], out)
        assert result.exit_code == 0
        assert document_at(out)["result"]["mu_A"] == pytest.approx(1.0)


@pytest.mark.integration
class TestLoadTimeCheck:
    """Test suite for the isometry check run while resolving --pair."""

    def test_load_check_uses_run_settings(self, mocker, tmp_path):
        """Test that a loaded pair is checked with --trials and --seed."""
        path = tmp_path / "pair.json"
        save_pair(random_generalized_permutation_pair(4, 3.0, seed=2), path)
        check = mocker.spy(basis, "verify_isometry")
        out = tmp_path / "doc.json"
        result = invoke(["coherence", "--pair", f"load:{path}", "--trials", "5", "--seed", "3"], out)
        assert result.exit_code == 0
        _, trials, seed = check.call_args.args
        assert (trials, seed) == (5, 3)
        document = document_at(out)
        assert document["pair"]["isometry_status"] == document["result"]["isometry"]["status"]

    def test_fourier_override_uses_run_settings(self, mocker, tmp_path):
        """Test that fourier:<n> --p is checked with --trials and --seed."""
        check = mocker.spy(basis, "verify_isometry")
        out = tmp_path / "doc.json"
        result = invoke(["coherence", "--pair", "fourier:4", "--p", "3", "--trials", "7", "--seed", "11"], out)
        assert result.exit_code == 2
        _, trials, seed = check.call_args.args
        assert (trials, seed) == (7, 11)
        document = document_at(out)
        assert document["pair"]["isometry_status"] == document["result"]["isometry"]["status"] == "failed"
