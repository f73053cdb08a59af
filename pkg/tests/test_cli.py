import pytest

from wavekit import cli


def test_defaults_are_valid():
    cfg = cli.RunConfig()
    assert cfg.eps_grid == tuple(sorted(cfg.eps_grid))


@pytest.mark.parametrize("kw", [{"dim": 0}, {"p": 1.0}, {"tol": 0.0}, {"t_grid": (2.0, 1.0)},
                                {"eps_grid": ()}])
def test_invalid_config(kw):
    with pytest.raises(cli.ConfigError):
        cli.RunConfig(**kw)


def test_read_config_and_override(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("# comment\ndim = 2\nt-grid = 1, 2, 3\nlambda_max = 40\n")
    args = cli.build_parser().parse_args(["verify-spherical", "--config", str(path), "--dim", "1"])
    cfg = cli.make_config(args)
    assert cfg.dim == 1 and cfg.t_grid == (1.0, 2.0, 3.0) and cfg.lambda_max == 40.0


def test_comment_before_section_header(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("# settings\n[wavekit]\nseed = 3\n")
    assert cli.read_config(path) == {"seed": 3}


def test_unknown_key_exits_2(tmp_path):
    path = tmp_path / "bad.ini"
    path.write_text("[wavekit]\nbogus = 1\n")
    assert cli.main(["verify-geometry", "--config", str(path), "-q"]) == 2


def test_missing_config_exits_2(tmp_path):
    assert cli.main(["verify-geometry", "--config", str(tmp_path / "nope.ini"), "-q"]) == 2


def test_suite_rejecting_parameters_exits_2(tmp_path):
    # n = 3 with p = 4 puts the kernel order n - alpha0 outside the finite-part range
    code = cli.main(["sharpness", "--dim", "3", "--p", "4", "--out", str(tmp_path), "-q"])
    assert code == 2


def test_failing_verdict_exits_1(tmp_path, monkeypatch):
    from wavekit.report import ExperimentReport

    def fake(command, cfg):
        rep = ExperimentReport("fake")
        rep.add_column("x", [1.0])
        rep.add_verdict("always fails", 2.0, 1.0)
        return [rep]

    monkeypatch.setattr(cli, "suite_reports", fake)
    assert cli.main(["verify-geometry", "--out", str(tmp_path), "-q"]) == 1
    summary = (tmp_path / "summary.txt").read_text()
    assert "always fails" in summary and "failures: 1" in summary
    assert (tmp_path / "fake.csv").read_text() == "x\n1\n"
    assert (tmp_path / "fake.gp").exists()


def test_spherical_run_writes_outputs(tmp_path):
    assert cli.main(["verify-spherical", "--dim", "2", "--out", str(tmp_path), "-q"]) == 0
    summary = (tmp_path / "summary.txt").read_text()
    assert "A_n = 2^(n/2) Gamma((n+1)/2)/sqrt(pi)" in summary
    assert "n=2 ratio exact amplitude / A_n = 1" in summary
    assert (tmp_path / "phi_closed_form_n2.csv").exists()
