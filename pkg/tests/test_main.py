import pytest

from main import EXIT_FAILURE, EXIT_USAGE, main

SINGLE = """\
experiment = single
problem = manufactured
h_list = 1/2
kappa_list = 1
k_rule = fixed:0.25
T = 0.5
"""


def write_config(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text)
    return path


def test_empty_argv_prints_usage(capsys):
    assert main([]) == EXIT_USAGE
    assert "usage" in capsys.readouterr().err


def test_unknown_subcommand(tmp_path, settings_path):
    config = write_config(tmp_path, SINGLE)
    assert main(["sweep", "--config", str(config), "--settings", str(settings_path)]) == EXIT_USAGE


def test_missing_config_flag(settings_path):
    assert main(["single", "--settings", str(settings_path)]) == EXIT_USAGE


def test_invalid_config(tmp_path, settings_path, caplog):
    config = write_config(tmp_path, SINGLE.replace("fixed:0.25", "h3"))
    assert main(["single", "--config", str(config), "--settings", str(settings_path)]) == EXIT_USAGE
    assert "line 5: k_rule" in caplog.text


def test_subcommand_must_match_config(tmp_path, settings_path):
    config = write_config(tmp_path, SINGLE)
    assert main(["decay", "--config", str(config), "--settings", str(settings_path)]) == EXIT_USAGE


def test_missing_config_file(tmp_path, settings_path):
    missing = tmp_path / "missing.cfg"
    assert main(["single", "--config", str(missing), "--settings", str(settings_path)]) == EXIT_USAGE


def test_single_run(tmp_path, settings_path):
    config = write_config(tmp_path, SINGLE)
    output_dir = tmp_path / "out"
    arguments = ["single", "--config", str(config), "--settings", str(settings_path)]
    assert main([*arguments, "--output-dir", str(output_dir)]) == 0
    assert (output_dir / "snapshot.vtk").exists()
    energy = (output_dir / "energy.csv").read_text().splitlines()
    assert energy[0] == "t,kinetic,gradient"
    assert len(energy) == 4


def test_runs_are_byte_identical(tmp_path, settings_path):
    config = write_config(tmp_path, SINGLE)
    arguments = ["single", "--config", str(config), "--settings", str(settings_path)]
    assert main([*arguments, "--output-dir", str(tmp_path / "a")]) == 0
    assert main([*arguments, "--output-dir", str(tmp_path / "b")]) == 0
    for name in ("snapshot.vtk", "energy.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_failed_run(tmp_path, settings_path, caplog):
    config = write_config(tmp_path, SINGLE + "max_iters = 1\npicard_tol = 1e-14\n")
    arguments = ["single", "--config", str(config), "--settings", str(settings_path)]
    assert main([*arguments, "--output-dir", str(tmp_path / "out")]) == EXIT_FAILURE
    assert "Time step 1" in caplog.text


@pytest.mark.parametrize("threads", ["0", "-1"])
def test_invalid_threads(tmp_path, settings_path, threads):
    config = write_config(tmp_path, SINGLE)
    arguments = ["single", "--config", str(config), "--settings", str(settings_path)]
    assert main([*arguments, "--threads", threads]) == EXIT_USAGE


def test_decay_and_cavity_runs(tmp_path, settings_path):
    decay = write_config(
        tmp_path,
        "experiment=decay\nh_list=1/2\nkappa_list=1\nk_rule=fixed:0.25\nT=0.5\n",
    )
    arguments = ["--config", str(decay), "--settings", str(settings_path)]
    assert main(["decay", *arguments, "--output-dir", str(tmp_path / "decay")]) == 0
    names = sorted(path.name for path in (tmp_path / "decay").iterdir())
    assert names == ["energy_k0.csv", "energy_k1.csv", "snapshot_k0.vtk", "snapshot_k1.vtk"]

    cavity = tmp_path / "cavity.cfg"
    cavity.write_text("experiment=cavity\nh_list=1/2\nkappa_list=1,1e-3\nk_rule=fixed:0.5\nT=1\n")
    arguments = ["--config", str(cavity), "--settings", str(settings_path), "--threads", "2"]
    assert main(["cavity", *arguments, "--output-dir", str(tmp_path / "cavity")]) == 0
    gap = (tmp_path / "cavity" / "steady_gap.csv").read_text().splitlines()
    assert gap[0] == "kappa,gap,reference_steady"
    assert [line.split(",")[0] for line in gap[1:]] == ["1", "0.001"]
    assert {line.split(",")[2] for line in gap[1:]} == {"false"}
    for kappa in ("k0", "k1", "k0.001"):
        assert (tmp_path / "cavity" / f"profiles_{kappa}.csv").exists()
        assert (tmp_path / "cavity" / f"snapshot_{kappa}.vtk").exists()


def test_convergence_and_regularization_runs(tmp_path, settings_path):
    convergence = write_config(
        tmp_path,
        "experiment=convergence\nh_list=1/2,1/4\nkappa_list=1,0\nk_rule=h\nT=0.5\n",
    )
    arguments = ["--config", str(convergence), "--settings", str(settings_path)]
    assert main(["convergence", *arguments, "--output-dir", str(tmp_path / "rates")]) == 0
    for name in ("velocity_l2", "velocity_h1", "pressure_l2"):
        lines = (tmp_path / "rates" / f"rates_{name}.csv").read_text().splitlines()
        assert lines[0] == "h,err_k1,rate_k1,err_k0,rate_k0"
        assert len(lines) == 3

    regularization = tmp_path / "regularization.cfg"
    regularization.write_text(
        "experiment=regularization\nh_list=1/2\nkappa_list=0,1\nk_rule=h\nT=0.5\nnu=0.5\n"
    )
    arguments = ["--config", str(regularization), "--settings", str(settings_path)]
    assert main(["regularization", *arguments, "--output-dir", str(tmp_path / "reg")]) == 0
    lines = (tmp_path / "reg" / "regularization.csv").read_text().splitlines()
    assert lines[0] == "h,err_u_k0,err_p_k0,err_u_k1,err_p_k1"
