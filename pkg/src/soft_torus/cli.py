"""Command-line front end: soft-torus <command> [options].

Exit codes: 0 witness found or every check passed, 2 no witness found,
3 verification failed, 1 any error.
"""

import argparse
import json
import logging
import sys
from dataclasses import fields

from soft_torus import __version__, tools
from soft_torus.certify import certify, verify_certificate
from soft_torus.config import (
    DEFAULT_ASCENT_STEPS,
    DEFAULT_RESTARTS,
    DEFAULT_SEED,
    DEFAULT_VERIFY_TOL,
)
from soft_torus.errors import SoftTorusError
from soft_torus.models import RunConfig
from soft_torus.poly_parser import parse
from soft_torus.storage import (
    dumps,
    load_certificate,
    load_family,
    load_matrix,
    save_certificate,
    write_json,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_WITNESS = 2
EXIT_VERIFY_FAILED = 3

LOG_FORMAT = "%(asctime)s [%(name)s] %(message)s"
LOG_DATEFMT = "%H:%M:%S"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit 1; exit code 2 is reserved for a failed search."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _window(text: str) -> tuple[int, int]:
    values = _int_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}")
    return values


def build_parser() -> argparse.ArgumentParser:
    """Parser for every subcommand; each one accepts --log-level."""
    parser = _ArgumentParser(
        prog="soft-torus",
        description="Finite dimensional certificates for *-polynomials in two almost-commuting unitaries.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default="INFO", choices=LOG_LEVELS, type=str.upper)

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("certify", parents=[common], help="build a certificate for a polynomial")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--poly", required=True, help='polynomial text, e.g. "u*v - v*u"')
    p.add_argument("--dims", type=_int_list, default=None, help="block sizes to search, e.g. 1,2")
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--ascent-steps", type=int, default=DEFAULT_ASCENT_STEPS)
    p.add_argument("--q", type=int, default=None, help="averaging order (default: v-degree of a*a plus one)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", dest="output_path")

    p = sub.add_parser("verify", parents=[common], help="re-check a certificate file")
    p.add_argument("--in", dest="input_path", required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_VERIFY_TOL)

    p = sub.add_parser("inspect", parents=[common], help="print the scalar fields of a certificate")
    p.add_argument("--in", dest="input_path", required=True)

    p = sub.add_parser("interp", parents=[common], help="spectral path from a unitary to the identity")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--in", dest="input_path", required=True)
    p.add_argument("--out", dest="output_path")

    p = sub.add_parser("dilate", parents=[common], help="unitary dilation of a contraction")
    p.add_argument("--in", dest="input_path", required=True)
    p.add_argument("--out", dest="output_path")

    p = sub.add_parser("order", parents=[common], help="crossed-product normal form of a polynomial")
    p.add_argument("--poly", required=True)

    p = sub.add_parser("rand", parents=[common], help="seeded random chain family")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--window", type=_window, default=(0, 0), help="lo,hi (write --window=-1,1 for negatives)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", dest="output_path")

    p = sub.add_parser("periodize", parents=[common], help="close a family on [-N, N] into a periodic one")
    p.add_argument("--in", dest="input_path", required=True)
    p.add_argument("--out", dest="output_path")

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """RunConfig from parsed arguments; options left unset keep the RunConfig defaults."""
    names = {f.name for f in fields(RunConfig)}
    return RunConfig(**{k: v for k, v in vars(args).items() if k in names and v is not None})


def _emit(payload: dict, output_path: str | None) -> None:
    if output_path:
        write_json(output_path, payload)
    else:
        print(dumps(payload))


# --- Commands ---


def cmd_certify(config: RunConfig) -> int:
    """Search for a witness, print its summary and optionally write the certificate.

    Returns:
        EXIT_OK when a nonzero witness was found, EXIT_NO_WITNESS otherwise.
    """
    a = parse(config.poly)
    certificate = certify(a, config.eps, config.search_params(), source=config.poly)
    if config.output_path:
        save_certificate(config.output_path, certificate)

    print(f"achieved_norm: {certificate.achieved_norm:.12g}")
    print(f"lower_bound: {certificate.lower_bound:.12g}")
    print(f"commutator_norm: {certificate.commutator_norm:.12g}")
    print(f"n: {certificate.n}")

    if not certificate.witness_found():
        logger.warning("NoWitnessFound: the search returned a zero value; this is not a proof that a = 0")
        return EXIT_NO_WITNESS
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    """Print one PASS or FAIL line per check; EXIT_VERIFY_FAILED if any check fails."""
    certificate = load_certificate(config.input_path)
    report = verify_certificate(certificate, tol=config.tol)
    for check in report.checks:
        if check.passed:
            print(f"PASS {check.name}: {check.detail}")
        else:
            print(f"FAIL {check.name} ({check.violation}): {check.detail}")
    if report.passed:
        print(f"all {len(report.checks)} checks passed at tol {config.tol:g}")
        return EXIT_OK
    print(f"{len(report.failures)} of {len(report.checks)} checks failed")
    return EXIT_VERIFY_FAILED


def cmd_inspect(config: RunConfig) -> int:
    """Print the scalar fields of a certificate file."""
    c = load_certificate(config.input_path)
    rows = [
        ("eps", c.eps),
        ("poly", c.poly),
        ("n", c.n),
        ("p", c.p),
        ("m", c.m),
        ("lambda", f"{c.lam.real:.12g}{c.lam.imag:+.12g}i"),
        ("achieved_norm", f"{c.achieved_norm:.12g}"),
        ("commutator_norm", f"{c.commutator_norm:.12g}"),
        ("lower_bound", f"{c.lower_bound:.12g}"),
        ("seed", c.seed),
        ("q", c.q),
        ("tool_version", c.tool_version),
    ]
    for name, value in rows:
        print(f"{name}: {value}")
    return EXIT_OK


def cmd_tools(config: RunConfig) -> int:
    """Run one of the building-block subcommands."""
    if config.command == "interp":
        _emit(tools.interp(load_matrix(config.input_path), config.eps), config.output_path)
    elif config.command == "dilate":
        _emit(tools.dilate(load_matrix(config.input_path)), config.output_path)
    elif config.command == "order":
        print(tools.order(config.poly))
    elif config.command == "rand":
        _emit(tools.rand(config.eps, config.dim, config.window, config.seed), config.output_path)
    elif config.command == "periodize":
        _emit(tools.close_periodically(load_family(config.input_path)), config.output_path)
    else:
        raise ValueError(f"unknown tool {config.command!r}")
    return EXIT_OK


COMMANDS = {
    "certify": cmd_certify,
    "verify": cmd_verify,
    "inspect": cmd_inspect,
}


def main(argv: list[str] | None = None) -> int:
    """Entry point for the soft-torus command.

    Args:
        argv: Arguments without the program name; defaults to sys.argv.

    Returns:
        The process exit code.
    """
    args = build_parser().parse_args(argv)
    config = config_from_args(args)

    logging.basicConfig(level=getattr(logging, config.log_level), format=LOG_FORMAT, datefmt=LOG_DATEFMT)

    handler = COMMANDS.get(config.command, cmd_tools)
    try:
        return handler(config)
    except (SoftTorusError, OSError, json.JSONDecodeError) as e:
        logger.debug("%s failed", config.command, exc_info=True)
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
