"""
Main entry point for GradPlast.

Subcommands:
    run <config>                      run one case
    mesh-dump <config>                write mesh and constraint sets as text
    sweep <config> <section.key=v1,v2,...> [<section.key=v1,v2,...> ...]
                                      one run per grid point, in parallel
    plot <run-dir>                    render the CSV series of a run to PNG

Exit code 0 on success, otherwise the category code of the error
(2 config, 3 mesh, 4 material, 5 solver, 6 file, 1 other).
"""

import argparse
import os
import sys
from typing import List, Optional

from gradplast.core.config import load_config
from gradplast.core.errorhandler import ErrorHandler
from gradplast.core.logger import Logger


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="Output directory (default: results/<case name>)")
    common.add_argument("--threads", type=int, default=None,
                        help="Worker processes for sweeps (default: $GRADPLAST_THREADS or all cores)")
    common.add_argument("--log-level", choices=["q", "n", "v"], default="n",
                        help="Console verbosity: q quiet, n normal, v verbose")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="gradplast", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="Run one case")
    p.add_argument("config", help="JSON configuration file")

    p = sub.add_parser("mesh-dump", parents=[common], help="Dump mesh and constraints as text")
    p.add_argument("config", help="JSON configuration file")

    p = sub.add_parser("sweep", parents=[common], help="Run one case per point of a parameter grid")
    p.add_argument("config", help="JSON configuration file")
    p.add_argument("assignments", nargs="+", metavar="assignment",
                   help="section.key=v1,v2,...; several assignments span a grid")

    p = sub.add_parser("plot", parents=[common], help="Plot the series of a run directory")
    p.add_argument("run_dir", help="Output directory of a previous run")
    return parser


def _out_dir(args, name: str) -> str:
    return args.out or os.path.join("results", name)


def cmd_run(args) -> int:
    from gradplast.cases import run_case

    cfg = load_config(args.config)
    out = _out_dir(args, cfg.name)
    Logger().set_run_directory(out)
    run_case(cfg, out)
    return 0


def cmd_mesh_dump(args) -> int:
    from gradplast.cases import CASES, write_mesh_dump

    cfg = load_config(args.config)
    case = CASES[cfg.kind](cfg)
    write_mesh_dump(case.mesh, case.constraints, os.path.join(_out_dir(args, cfg.name), "mesh.txt"))
    return 0


def cmd_sweep(args) -> int:
    from gradplast.cases.sweep import run_sweep

    out = args.out or os.path.join("results", "sweep_" + os.path.splitext(os.path.basename(args.config))[0])
    Logger().set_run_directory(out)
    run_sweep(args.config, args.assignments, out, threads=args.threads, log_level=args.log_level)
    return 0


def cmd_plot(args) -> int:
    from gradplast.cases.plotting import plot_run

    plot_run(args.run_dir)
    return 0


COMMANDS = {
    "run": cmd_run,
    "mesh-dump": cmd_mesh_dump,
    "sweep": cmd_sweep,
    "plot": cmd_plot,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse the command line and dispatch to the subcommand.

    Returns:
        int: Process exit code
    """
    args = build_parser().parse_args(argv)
    logger = Logger()
    logger.set_level(args.log_level)
    logger.debug(f"Command: {args.command}")
    try:
        return COMMANDS[args.command](args)
    except Exception as e:
        return ErrorHandler(logger).handle_error(e, f"'{args.command}' failed")


if __name__ == "__main__":
    sys.exit(main())
