import argparse
import logging
import sys
import textwrap

from .color_printer import color_printer as printer
from .config import COMMANDS, get_config_from_environ, load_config
from .exc import ConfigError, SolverError
from .runner import run
from .strategy import INIJSONStrategy


class ArgParser(argparse.ArgumentParser):
    def error(self, message):
        message = f"{self.prog} error: {message}\n"
        message = printer.string_error(message)
        self.print_usage(sys.stderr)
        self.exit(2, message)


def parse_override(item):
    """Parse ``dotted.name=value``; values are JSON, else plain strings."""
    if "=" not in item:
        raise argparse.ArgumentTypeError(f"Expected NAME=VALUE; got `{item}`")
    name, value = item.split("=", 1)
    try:
        value = INIJSONStrategy().decode_value(value)
    except ValueError:
        pass
    return name.strip(), value


def main(argv=None):
    """Verify and solve generalized spin and pseudospin symmetries.

    Commands:

        verify-algebra  check the coupling matrix conditions, commutators,
                        SU(2) algebra and dispersion over a seeded sweep
        spectrum        bound states (3d, 2d or 1d) with oracle comparison
        doublets        symmetry partners and their splittings
        scan-breaking   splitting vs. symmetry-breaking amplitude

    Settings come from --config (file.cfg#section or file.json#section),
    else $SPIN_SYMMETRY_FILE, else spin-symmetry.cfg in the current
    directory, else the built-in defaults.

    Exit status is 0 when every check passes, 1 on a solver error or a
    failed check and 2 on a config error.

    """
    description = textwrap.dedent("    %s" % main.__doc__)

    parser = ArgParser(
        prog="spin-symmetry",
        description=description,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument(
        "-c",
        "--config",
        default=None,
        help="Config file and (optionally) section as file.cfg#section",
    )
    parser.add_argument(
        "-o",
        "--out",
        default=None,
        help="Directory to write data files to (default = output.directory)",
    )
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument(
        "-s",
        "--set",
        dest="overrides",
        action="append",
        default=[],
        type=parse_override,
        metavar="NAME=VALUE",
        help="Override a setting, e.g. --set radial.grid.points=8000",
    )
    parser.add_argument("-q", "--quiet", action="store_true", default=None)
    parser.add_argument("-v", "--verbose", action="store_true", default=False)

    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    environ_config = get_config_from_environ(None, None)
    quiet = environ_config["quiet"] if args.quiet is None else args.quiet
    printer.quiet = bool(quiet)

    overrides = dict(args.overrides)
    threads = environ_config["threads"] if args.threads is None else args.threads
    if threads is not None:
        overrides["threads"] = threads
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["output.directory"] = args.out

    try:
        config = load_config(args.config, overrides=overrides, command=args.command)
    except ConfigError as exc:
        printer.print_error(str(exc), file=sys.stderr)
        return 2

    try:
        result = run(config)
    except SolverError as exc:
        printer.print_error(f"{args.command} failed: {exc}", file=sys.stderr)
        return 1

    return 0 if result.passed else 1


if __name__ == "__main__":
    sys.exit(main())
