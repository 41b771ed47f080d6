"""
Command-line surface for uncertainty-principle experiments.

Builds or loads a basis pair, runs one operation against it and writes a
JSON document (or a flat CSV projection) to stdout or --out.

Exit status: 0 on success, 2 when the pair failed its isometry check
(the document is still written), 1 on any error.
"""

import json
import logging
import os
import sys
from dataclasses import dataclass
from typing import Any, Optional

import click
import numpy as np
import pandas as pd
from dotenv import load_dotenv

from basis import (
    BasisPair,
    VectorInX,
    analysis_in_g,
    load_genperm_spec,
    load_pair,
    make_fourier_pair,
    pair_from_matrix,
    pair_to_document,
    verify_isometry,
)
from bounds import ProofTrace, VerificationReport, hilbert_corollary_bound, trace_proof, verify_uncertainty
from errors import DimensionMismatchError, DomainError, UncertaintyError
from search import (
    Witness,
    picket_fence,
    product_grid,
    slack_landscape,
    strongest_witness,
    tightness_trials,
)
from support import minimal_support

load_dotenv()

DEFAULT_SEED = int(os.getenv("FDSUP_SEED", "0"))
DEFAULT_TRIALS = int(os.getenv("FDSUP_TRIALS", "100"))
DEFAULT_FORMAT = os.getenv("FDSUP_FORMAT", "json")
DEFAULT_RESTARTS = int(os.getenv("FDSUP_RESTARTS", "16"))
DEFAULT_ITERS = int(os.getenv("FDSUP_ITERS", "200"))
LOG_LEVEL = os.getenv("FDSUP_LOG_LEVEL", "WARNING")

SCHEMA_VERSION = "1"
COMMANDS = ("coherence", "verify", "support", "search", "picket", "landscape", "export")
FORMATS = ("json", "csv")
PAIR_KINDS = ("fourier", "genperm", "load")


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation needs."""
    command: str
    pair_source: Optional[str] = None
    p: Optional[float] = None
    eps: float = 0.0
    delta: float = 0.0
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    output_format: str = DEFAULT_FORMAT
    output_path: Optional[str] = None
    grid: Optional[str] = None
    x: Optional[str] = None
    m: Optional[int] = None
    restarts: int = DEFAULT_RESTARTS
    iters: int = DEFAULT_ITERS


def validate_level(name: str, value: float) -> tuple[bool, Optional[str]]:
    """
    Validate an approximation level (eps or delta).

    Returns:
      Tuple of (is_valid, error_message). If valid, error_message is None.
    """
    if not 0.0 <= value < 1.0:
        return False, f"{name} must lie in [0, 1), got {value}"
    return True, None


def validate_positive(name: str, value: Optional[int]) -> tuple[bool, Optional[str]]:
    if value is None or value < 1:
        return False, f"{name} must be a positive integer, got {value}"
    return True, None


def validate_pair_source(source: Optional[str]) -> tuple[bool, Optional[str]]:
    """Validate a --pair value of the form fourier:<n>, genperm:<file> or load:<file>."""
    if not source:
        return False, "--pair is required (fourier:<n> | genperm:<file> | load:<file>)"
    kind, _, argument = source.partition(":")
    if kind not in PAIR_KINDS or not argument:
        return False, f"unrecognized pair source {source!r}"
    if kind == "fourier" and not argument.isdigit():
        return False, f"fourier dimension must be a positive integer, got {argument!r}"
    return True, None


def validate_config(config: RunConfig) -> tuple[bool, Optional[str]]:
    checks = [
        validate_level("eps", config.eps),
        validate_level("delta", config.delta),
        validate_positive("trials", config.trials),
        validate_positive("restarts", config.restarts),
        validate_positive("iters", config.iters),
    ]
    if config.output_format not in FORMATS:
        checks.append((False, f"format must be one of {', '.join(FORMATS)}, got {config.output_format!r}"))
    if config.command == "picket":
        checks.append(validate_positive("m", config.m))
    else:
        checks.append(validate_pair_source(config.pair_source))
    if config.command == "export" and config.output_format != "json":
        checks.append((False, "export writes the matrix file format, use --format json"))
    for ok, message in checks:
        if not ok:
            return False, message
    return True, None


def parse_floats(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise DomainError(f"cannot read numbers from {text!r}") from e


def parse_grid(text: str) -> tuple[list[float], list[float]]:
    """
    Parse 'e1,e2,...:d1,d2,...' into eps and delta values.

    Without a colon the same values are used for both levels.
    """
    eps_text, colon, delta_text = text.partition(":")
    eps_values = parse_floats(eps_text)
    delta_values = parse_floats(delta_text) if colon else list(eps_values)
    if not eps_values or not delta_values:
        raise DomainError(f"grid {text!r} has no values")
    for value in eps_values + delta_values:
        ok, message = validate_level("grid value", value)
        if not ok:
            raise DomainError(message)
    return eps_values, delta_values


def parse_vector(text: str) -> np.ndarray:
    """Comma-separated entries in Python complex literal form, e.g. '1,0,0.5-1j'."""
    try:
        return np.asarray([complex(item.strip().replace(" ", "")) for item in text.split(",")], dtype=np.complex128)
    except ValueError as e:
        raise DomainError(f"cannot read a vector from {text!r}") from e


def resolve_pair(config: RunConfig) -> tuple[BasisPair, str]:
    if config.command == "picket":
        n = config.m * config.m
        return make_fourier_pair(n), f"fourier:{n}"

    kind, _, argument = config.pair_source.partition(":")
    if kind == "fourier":
        pair = make_fourier_pair(int(argument))
        if config.p is not None and config.p != 2.0:
            pair = pair_from_matrix(pair.A, config.p, trials=config.trials, seed=config.seed)
        return pair, config.pair_source
    if kind == "genperm":
        return load_genperm_spec(argument, config.p), config.pair_source
    return load_pair(argument, config.p, trials=config.trials, seed=config.seed), config.pair_source


def resolve_vector(config: RunConfig, pair: BasisPair) -> VectorInX:
    if config.x:
        f = parse_vector(config.x)
        if f.size != pair.n:
            raise DimensionMismatchError(f"--x has {f.size} entries, pair has dimension {pair.n}")
        return VectorInX(f)
    rng = np.random.default_rng(config.seed)
    return VectorInX(rng.standard_normal(pair.n) + 1j * rng.standard_normal(pair.n))


class ReportBuilder:
    """
    Builds the JSON-ready pieces of every output document.
    Report fields mirror VerificationReport names exactly.
    """

    @staticmethod
    def complex_list(values: np.ndarray) -> list[list[float]]:
        return [[float(v.real), float(v.imag)] for v in values]

    @staticmethod
    def pair(pair: BasisPair, source: str) -> dict:
        return {
            "source": source,
            "n": pair.n,
            "p": pair.p,
            "q": pair.q,
            "mu_A": pair.mu_A,
            "mu_B": pair.mu_B,
            "isometry_status": pair.isometry_status.value,
        }

    @staticmethod
    def report(report: VerificationReport) -> dict:
        return {
            "eps": report.eps,
            "delta": report.delta,
            "M": report.M.to_list(),
            "N": report.N.to_list(),
            "o_M": report.o_M,
            "o_N": report.o_N,
            "lhs_ME": report.lhs_ME,
            "rhs_ME": report.rhs_ME,
            "lhs_ME2": report.lhs_ME2,
            "rhs_ME2": report.rhs_ME2,
            "slack_ME": report.slack_ME,
            "slack_ME2": report.slack_ME2,
            "holds": report.holds,
            "hypothesis_met": report.hypothesis_met,
            "support_rule": report.support_rule,
        }

    @staticmethod
    def report_row(report: VerificationReport) -> dict:
        row = ReportBuilder.report(report)
        row["M"] = " ".join(str(j) for j in report.M)
        row["N"] = " ".join(str(k) for k in report.N)
        return row

    @staticmethod
    def proof(trace: ProofTrace) -> dict:
        return {
            "target": trace.target,
            "V": {"upper": trace.upper_V, "estimate": trace.estimate_V, "witness": trace.witness_V},
            "W": {"upper": trace.upper_W, "estimate": trace.estimate_W, "witness": trace.witness_W},
            "upper_holds": trace.upper_holds,
            "lower_holds": trace.lower_holds,
        }

    @staticmethod
    def witness(witness: Witness) -> dict:
        return {
            "x": ReportBuilder.complex_list(witness.x.f_coords),
            "eps": witness.eps,
            "delta": witness.delta,
            "trial": witness.trial,
            "family": witness.family,
            "report": ReportBuilder.report(witness.report),
        }


Result = tuple[dict, list[dict]]


def run_coherence(config: RunConfig, pair: BasisPair) -> Result:
    check = verify_isometry(pair, config.trials, config.seed)
    result = {
        "mu_A": pair.mu_A,
        "mu_B": pair.mu_B,
        "isometry": {
            "status": check.status.value,
            "max_relative_error": check.max_relative_error,
            "trials": check.trials,
            "seed": check.seed,
        },
    }
    row = {"mu_A": pair.mu_A, "mu_B": pair.mu_B, "status": check.status.value,
           "max_relative_error": check.max_relative_error}
    return result, [row]


def run_verify(config: RunConfig, pair: BasisPair) -> Result:
    x = resolve_vector(config, pair)
    report = verify_uncertainty(pair, x, config.eps, config.delta)
    trace = trace_proof(pair, x, config.eps, config.delta, report, config.restarts, config.iters, config.seed)
    result = {
        "x": ReportBuilder.complex_list(x.f_coords),
        "g_coords": ReportBuilder.complex_list(analysis_in_g(pair, x)),
        "report": ReportBuilder.report(report),
        "proof": ReportBuilder.proof(trace),
    }
    if pair.p == 2.0:
        result["hilbert"] = {
            "o_M_o_N": report.o_M * report.o_N,
            "bound": hilbert_corollary_bound(pair, config.eps, config.delta),
        }
    return result, [ReportBuilder.report_row(report)]


def run_support(config: RunConfig, pair: BasisPair) -> Result:
    x = resolve_vector(config, pair)
    levels = parse_grid(config.grid)[0] if config.grid else [config.eps]
    sides = {"f": x.f_coords, "g": analysis_in_g(pair, x)}
    result: dict[str, Any] = {}
    rows = []
    for side, coords in sides.items():
        profile = []
        for eps in sorted(levels):
            M = minimal_support(coords, eps, pair.p)
            profile.append({"eps": eps, "cardinality": M.cardinality, "support": M.to_list()})
            rows.append({"side": side, "eps": eps, "cardinality": M.cardinality,
                         "support": " ".join(str(j) for j in M)})
        result[f"{side}_profile"] = profile
    result["x"] = ReportBuilder.complex_list(x.f_coords)
    return result, rows


def run_search(config: RunConfig, pair: BasisPair) -> Result:
    outcomes = tightness_trials(pair, config.eps, config.delta, config.trials, config.seed)
    witness = strongest_witness(outcomes, config.eps, config.delta)
    rows = [
        {
            "trial": o.trial,
            "family": o.family,
            "slack_ME": o.report.slack_ME,
            "slack_ME2": o.report.slack_ME2,
            "o_M": o.report.o_M,
            "o_N": o.report.o_N,
        }
        for o in outcomes
    ]
    return {"trials": config.trials, "witness": ReportBuilder.witness(witness)}, rows


def run_picket(config: RunConfig, pair: BasisPair) -> Result:
    witness = picket_fence(config.m)
    return {"m": config.m, "witness": ReportBuilder.witness(witness)}, [ReportBuilder.report_row(witness.report)]


def run_landscape(config: RunConfig, pair: BasisPair) -> Result:
    x = resolve_vector(config, pair)
    if config.grid:
        grid = product_grid(*parse_grid(config.grid))
    else:
        grid = [(config.eps, config.delta)]
    reports = slack_landscape(pair, x, grid)
    result = {
        "x": ReportBuilder.complex_list(x.f_coords),
        "reports": [ReportBuilder.report(r) for r in reports],
    }
    return result, [ReportBuilder.report_row(r) for r in reports]


HANDLERS = {
    "coherence": run_coherence,
    "verify": run_verify,
    "support": run_support,
    "search": run_search,
    "picket": run_picket,
    "landscape": run_landscape,
}


def build_document(config: RunConfig, pair: BasisPair, source: str) -> tuple[dict, list[dict]]:
    if config.command == "export":
        document = pair_to_document(pair)
        document["schema_version"] = SCHEMA_VERSION
        return document, []
    result, rows = HANDLERS[config.command](config, pair)
    document = {
        "schema_version": SCHEMA_VERSION,
        "command": config.command,
        "seed": config.seed,
        "pair": ReportBuilder.pair(pair, source),
        "result": result,
    }
    return document, rows


def render(config: RunConfig, document: dict, rows: list[dict]) -> str:
    if config.output_format == "csv":
        frame = pd.DataFrame(rows)
        frame.insert(0, "seed", config.seed)
        frame.insert(0, "command", config.command)
        return frame.to_csv(index=False)
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def write_output(config: RunConfig, text: str) -> None:
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        click.echo(text, nl=False)


def run(config: RunConfig) -> int:
    """
    Execute one command and write its document.

    Returns:
      0 on success, 2 if the pair is not an isometry, 1 on error
    """
    ok, message = validate_config(config)
    if not ok:
        click.echo(f"❌ {DomainError.label}: {message}", err=True)
        return 1

    try:
        pair, source = resolve_pair(config)
        document, rows = build_document(config, pair, source)
        write_output(config, render(config, document, rows))
    except UncertaintyError as e:
        click.echo(f"❌ {e.label}: {e}", err=True)
        return 1
    except OSError as e:
        click.echo(f"❌ File error: {e}", err=True)
        return 1

    if not pair.hypothesis_met:
        click.echo(f"⚠️ Hypothesis not met: {source} is not an l^{pair.p:g} isometry", err=True)
        return 2
    return 0


@click.command(context_settings={"help_option_names": ["-h", "--help"]})
@click.argument("command", type=click.Choice(COMMANDS))
@click.option("--pair", "pair_source", default=None, help="fourier:<n> | genperm:<file> | load:<file>")
@click.option("--p", "p", type=float, default=None, help="Exponent p (overrides the pair file)")
@click.option("--eps", type=float, default=0.0, show_default=True, help="Support level of theta_f x")
@click.option("--delta", type=float, default=0.0, show_default=True, help="Support level of theta_g x")
@click.option("--trials", type=int, default=DEFAULT_TRIALS, show_default=True)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--grid", default=None, help="e1,e2,...:d1,d2,... (landscape, support)")
@click.option("--x", "x", default=None, help="theta_f x as comma-separated complex entries")
@click.option("--m", "m", type=int, default=None, help="Comb spacing for picket (n = m^2)")
@click.option("--restarts", type=int, default=DEFAULT_RESTARTS, show_default=True)
@click.option("--iters", type=int, default=DEFAULT_ITERS, show_default=True)
@click.option("--format", "output_format", default=DEFAULT_FORMAT, show_default=True, help="json | csv")
@click.option("--out", "output_path", default=None, help="Write the document here instead of stdout")
@click.option("--log-level", default=LOG_LEVEL, show_default=True,
              type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False))
@click.pass_context
def main(ctx, command, pair_source, p, eps, delta, trials, seed, grid, x, m, restarts, iters,
         output_format, output_path, log_level):
    """Verify and explore approximate support uncertainty bounds for basis pairs."""
    logging.basicConfig(level=log_level.upper(), stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    config = RunConfig(
        command=command,
        pair_source=pair_source,
        p=p,
        eps=eps,
        delta=delta,
        trials=trials,
        seed=seed,
        output_format=output_format,
        output_path=output_path,
        grid=grid,
        x=x,
        m=m,
        restarts=restarts,
        iters=iters,
    )
    ctx.exit(run(config))


def entrypoint(argv: Optional[list[str]] = None) -> int:
    """Run the CLI with usage errors mapped to exit status 1."""
    try:
        return main.main(args=argv, prog_name="fdsup", standalone_mode=False) or 0
    except click.ClickException as e:
        e.show()
        return 1
    except click.Abort:
        return 1


if __name__ == "__main__":
    sys.exit(entrypoint())
