from pathlib import Path

import pytest

from core.config import ConfigError, ExperimentType, load_config, parse_config
from fem.timestepper import StepRuleKind
from problems import ProblemType

ROOT = Path(__file__).resolve().parent.parent


def test_defaults_are_filled():
    config = parse_config("experiment=convergence\nh_list=1/4,1/8\nkappa_list=1\nk_rule=h2")
    assert config.experiment == ExperimentType.CONVERGENCE
    assert config.ns == [4, 8]
    assert config.kappa_list == [1.0]
    assert config.k_rule.kind == StepRuleKind.H2
    assert config.nu == 1.0
    assert config.T == 1.0
    assert config.picard_tol == 1e-10
    assert config.max_iters == 50
    assert config.output_dir == Path("output")
    assert config.problem is None


def test_kappa_list_with_four_entries():
    config = parse_config(
        "experiment=convergence\nh_list=1/4\nkappa_list=1,1e-3,1e-6,1e-9\nk_rule=h2"
    )
    assert config.kappa_list == [1.0, 1e-3, 1e-6, 1e-9]


def test_comments_blank_lines_and_spacing():
    config = parse_config(
        "# cavity run\n\nexperiment = cavity  # lid-driven\n"
        "h_list = 1/32\nkappa_list = 1, 1e-3, 1e-5\nk_rule = fixed:0.1\nT = 40\n"
        "problem = cavity\noutput_dir = out/cavity\n"
    )
    assert config.ns == [32]
    assert config.k_rule.kind == StepRuleKind.FIXED
    assert config.k_rule.value == 0.1
    assert config.T == 40.0
    assert config.problem == ProblemType.CAVITY
    assert config.output_dir == Path("out/cavity")


def test_fractional_fixed_step():
    config = parse_config("experiment=decay\nh_list=0.0625\nkappa_list=1\nk_rule=fixed:1/100")
    assert config.ns == [16]
    assert config.k_rule.value == pytest.approx(0.01)


@pytest.mark.parametrize(
    "text, line, key",
    [
        ("experiment=convergence\nh_list=1/4\nkappa_list=1\nk_rule=h3", 4, "k_rule"),
        ("experiment=convergence\nmesh=1/4", 2, "mesh"),
        ("experiment=sweep", 1, "experiment"),
        ("experiment=convergence\nh_list=1/3.5", 2, "h_list"),
        ("experiment=convergence\nh_list=1/4,,1/8", 2, "h_list"),
        ("experiment=convergence\nkappa_list=-1", 2, "kappa_list"),
        ("experiment=convergence\nnu=0", 2, "nu"),
        ("experiment=convergence\nmax_iters=2.5", 2, "max_iters"),
        ("experiment=convergence\nT=", 2, "T"),
        ("experiment=convergence\nh_list", 2, "h_list"),
        ("experiment=convergence\nexperiment=decay", 2, "experiment"),
        ("experiment=convergence\nh_list=1/4\nkappa_list=1", 4, "k_rule"),
        ("experiment=convergence\nh_list=1/4,1/6\nkappa_list=1\nk_rule=h", 2, "h_list"),
        ("experiment=decay\nh_list=1/4,1/8\nkappa_list=1\nk_rule=h", 2, "h_list"),
        ("experiment=single\nh_list=1/4\nkappa_list=1,0\nk_rule=h", 3, "kappa_list"),
        ("experiment=single\nh_list=1/4\nkappa_list=1\nk_rule=fixed:0", 4, "k_rule"),
    ],
)
def test_errors_name_line_and_key(text, line, key):
    with pytest.raises(ConfigError) as error:
        parse_config(text)
    assert error.value.line == line
    assert error.value.key == key
    assert str(error.value).startswith(f"line {line}: {key}")


def test_expected_experiment():
    text = "experiment=decay\nh_list=1/4\nkappa_list=1\nk_rule=h"
    assert parse_config(text, ExperimentType.DECAY).experiment == ExperimentType.DECAY
    with pytest.raises(ConfigError) as error:
        parse_config(text, ExperimentType.CAVITY)
    assert error.value.line == 1


@pytest.mark.parametrize("path", sorted((ROOT / "configs").glob("*.cfg")))
def test_shipped_configs_parse(path):
    config = load_config(path)
    assert config.kappa_list
