import logging
import sys
import tomllib
from argparse import ArgumentParser, ArgumentTypeError
from pathlib import Path

from core import Experiment
from core.config import ConfigError, ExperimentType, RunConfig, load_config
from core.simulation.cavity import Cavity
from core.simulation.decay import Decay
from core.simulation.single import Single
from core.verification.convergence import Convergence
from core.verification.regularization import Regularization
from interfaces import InterfaceFactory
from interfaces.linear_solver import LinearSolver
from interfaces.output import Output

logger = logging.getLogger(__name__)

EXIT_FAILURE = 1
EXIT_USAGE = 2


def load_settings(path: str) -> dict:
    try:
        with open(path, "rb") as file:
            return tomllib.load(file)
    except (OSError, tomllib.TOMLDecodeError) as error:
        raise ArgumentTypeError(f"cannot load settings {path}: {error}") from error


def cli() -> ArgumentParser:
    """CLI for main.py

    Returns
    -------
    ArgumentParser
        The CLI parser.
    """
    parser = ArgumentParser(prog="main.py")
    parser.add_argument(
        "experiment",
        choices=[x.name.lower() for x in ExperimentType],
        help="Experiment to run",
    )
    parser.add_argument(
        "--config",
        type=Path,
        required=True,
        help="Path to the key=value run configuration",
    )
    parser.add_argument(
        "--output-dir",
        type=Path,
        default=None,
        help="Override of the configured output directory",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="Independent runs solved concurrently",
    )
    parser.add_argument(
        "--settings",
        type=load_settings,
        default="settings.toml",
        help="Path to the settings file",
    )
    parser.description = """Kelvin-Voigt finite element experiments."""
    return parser


def configure_logging(settings: dict):
    logging.basicConfig(
        level=settings.get("level", "INFO"),
        format=settings.get("format", "%(asctime)s %(levelname)s %(name)s: %(message)s"),
    )


def load_experiment(
    config: RunConfig,
    solver: LinearSolver,
    output: Output,
    threads: int,
) -> Experiment:
    """Load the experiment a configuration declares.

    Parameters
    ----------
    config : RunConfig
        Validated run configuration.
    solver : LinearSolver
        Linear solver backend.
    output : Output
        Result writer backend.
    threads : int
        Independent runs solved concurrently.

    Returns
    -------
    Experiment
        The experiment, ready to run.

    Raises
    ------
    ValueError
        If the experiment type is invalid.
    """
    experiment_class: type[Experiment]
    match config.experiment:
        case ExperimentType.CONVERGENCE:
            experiment_class = Convergence
        case ExperimentType.REGULARIZATION:
            experiment_class = Regularization
        case ExperimentType.DECAY:
            experiment_class = Decay
        case ExperimentType.CAVITY:
            experiment_class = Cavity
        case ExperimentType.SINGLE:
            experiment_class = Single
        case _:
            raise ValueError(f"Invalid experiment type: {config.experiment}")
    return experiment_class(config, solver, output, threads)


def main(argv: list[str] | None = None) -> int:
    """Run an experiment from the command line.

    Parameters
    ----------
    argv : list[str] | None, optional
        Arguments without the program name, by default sys.argv[1:].

    Returns
    -------
    int
        0 on success, 1 if the run failed, 2 on a usage or configuration error.
    """
    argv = sys.argv[1:] if argv is None else argv
    parser = cli()
    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit:
        return EXIT_USAGE if exit.code else 0
    configure_logging(args.settings.get("logging", {}))
    if args.threads < 1:
        logger.error("Invalid number of threads: %d", args.threads)
        return EXIT_USAGE

    try:
        config = load_config(args.config, ExperimentType[args.experiment.upper()])
    except ConfigError as error:
        logger.error("%s: %s", args.config, error)
        return EXIT_USAGE
    except OSError as error:
        logger.error("Cannot read configuration: %s", error)
        return EXIT_USAGE

    try:
        interface_factory = InterfaceFactory(args.settings)
        solver = interface_factory.get_interface(LinearSolver)  # type: ignore
        output = interface_factory.get_interface(Output)  # type: ignore
        experiment = load_experiment(config, solver, output, args.threads)
        experiment(args.output_dir)
    except Exception as error:
        logger.error("%s failed: %s", args.experiment, error)
        logger.debug("Traceback", exc_info=True)
        return EXIT_FAILURE
    return 0


if __name__ == "__main__":
    sys.exit(main())
