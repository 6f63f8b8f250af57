"""Command-line entry point ``nvreadout``.

Exit codes: 0 success, 2 invalid configuration or input data, 3 a fit or
solver did not converge, 4 file-system errors.
"""

import argparse
import sys

from ..errors import IllConditioned, InvalidInput, NoPeakFound, NotConverged, ParseError
from .config import ConfigError, load_config
from .pipeline import COMMANDS, run_pipeline

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NOT_CONVERGED = 3
EXIT_IO = 4

_HELP = {
    "simulate": "rate-model read-out traces and contrast",
    "fit": "fit a curve model to a data file",
    "rates": "fit K_0, K_s, K_m to two read-out traces and compare mixing variants",
    "spectrum": "Q, beta and Purcell factor from a cavity-mode spectrum",
    "purcell": "predict the Purcell factor from cavity parameters",
    "collect": "collection efficiencies and emission fractions",
    "snr": "SNR enhancement for ZPL-only and broadband read-out",
    "mc": "Monte Carlo check of the photon-counting SNR",
    "tune": "cavity-mode tuning plan",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="nvreadout", description="NV spin read-out analysis pipelines.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND",
                                parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, help=_HELP[name], description=_HELP[name])
        _add_globals(p)
    return parser


def _add_globals(p):
    p.add_argument("--config", required=True, metavar="PATH", help="INI configuration file")
    p.add_argument("--output", metavar="DIR",
                   help="write report and CSV artifacts here instead of printing")
    p.add_argument("--seed", type=int, metavar="N", help="overrides [run] seed")
    p.add_argument("--format", choices=("csv", "text"), default="text",
                   help="report format (default: text)")


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        report = run_pipeline(cfg, args.command, seed=args.seed)
        if args.output:
            report.write(args.output, args.format)
        else:
            sys.stdout.write(report.render(args.format))
    except ConfigError as exc:
        for msg in exc.messages:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_VALIDATION
    except (InvalidInput, ParseError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NotConverged, IllConditioned, NoPeakFound) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
