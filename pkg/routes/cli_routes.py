import argparse
from typing import Callable, Dict

from controller.cost_table_controller import cost_table_controller
from controller.partition_stats_controller import partition_stats_controller
from controller.run_controller import run_controller
from controller.selector_bench_controller import selector_bench_controller
from controller.theory_controller import theory_controller
from utils.command_list import (
    COST_TABLE_COMMAND,
    PARTITION_STATS_COMMAND,
    RUN_COMMAND,
    SELECTOR_BENCH_COMMAND,
    THEORY_COMMAND,
)
from utils.message import WELCOME_MESSAGE


def _int_list(text: str):
    return [int(value) for value in text.split(",") if value]


def _float_list(text: str):
    return [float(value) for value in text.split(",") if value]


def build_parser() -> argparse.ArgumentParser:
    """
    Command line surface: one sub-command per controller.

    Returns:
        argparse.ArgumentParser: The configured parser.
    """
    parser = argparse.ArgumentParser(prog="dynamicfl-sim", description=WELCOME_MESSAGE)
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser(RUN_COMMAND, help="Train with an experiment config and write metrics.")
    run.add_argument("--config", required=True, help="JSON experiment config.")
    run.add_argument("--seed", type=int, default=None, help="Override the master seed.")
    run.add_argument("--out", default=None, help="Output directory.")
    run.add_argument("--threads", type=int, default=None, help="Client worker threads (0 = auto).")

    theory = subparsers.add_parser(THEORY_COMMAND, help="Check the quadratic DynamicFL/FedSGD equivalence grid.")
    theory.add_argument("--seed", type=int, default=0)
    theory.add_argument("--out", default=None)
    theory.add_argument("--eta", type=_float_list, default=None, help="Comma separated learning rates.")
    theory.add_argument("--k", type=_int_list, default=None, help="Comma separated local step counts.")
    theory.add_argument("--r", type=_int_list, default=None, help="Comma separated round counts.")
    theory.add_argument("--scenarios", type=int, default=20)

    bench = subparsers.add_parser(SELECTOR_BENCH_COMMAND, help="Compare subset selectors on random problems.")
    bench.add_argument("--sizes", type=_int_list, default=[10], help="Comma separated candidate counts.")
    bench.add_argument("--trials", type=int, default=200)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", default=None)

    stats = subparsers.add_parser(PARTITION_STATS_COMMAND, help="Dump per-client label histograms and KL to global.")
    stats.add_argument("--config", required=True)
    stats.add_argument("--seed", type=int, default=None)
    stats.add_argument("--out", default=None)

    costs = subparsers.add_parser(COST_TABLE_COMMAND, help="Normalised costs of interval configurations.")
    costs.add_argument("--L", type=int, default=250)
    costs.add_argument("--actives", type=int, default=10)
    costs.add_argument("--high-fraction", type=float, default=0.3)
    costs.add_argument("--out", default=None)
    return parser


def _run(args) -> dict:
    return run_controller(args.config, args.seed, args.out, args.threads)


def _theory(args) -> dict:
    return theory_controller(args.seed, args.out, args.eta, args.k, args.r, args.scenarios)


def _bench(args) -> dict:
    return selector_bench_controller(args.sizes, args.trials, args.seed, args.out)


def _stats(args) -> dict:
    return partition_stats_controller(args.config, args.seed, args.out)


def _costs(args) -> dict:
    return cost_table_controller(args.L, args.actives, args.high_fraction, args.out)


COMMANDS: Dict[str, Callable[[argparse.Namespace], dict]] = {
    RUN_COMMAND: _run,
    THEORY_COMMAND: _theory,
    SELECTOR_BENCH_COMMAND: _bench,
    PARTITION_STATS_COMMAND: _stats,
    COST_TABLE_COMMAND: _costs,
}


def dispatch(args: argparse.Namespace) -> dict:
    """Route parsed arguments to their controller."""
    return COMMANDS[args.command](args)
