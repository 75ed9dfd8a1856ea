"""End-to-end tests of the command-line client."""

from stochrel.cli import main


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestRun:
    def test_run_config_file_writes_artifacts(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("kind = force-path\nn_samples = 101\nseeds = 5\n")
        out = tmp_path / "out"
        code, stdout, _ = run_cli(["run", str(cfg), "--out", str(out)], capsys)
        assert code == 0
        assert (out / "force_path_seed5.csv").is_file()
        assert (out / "manifest.txt").is_file()
        assert "force_path_seed5.csv" in stdout
        manifest = (out / "manifest.txt").read_text()
        assert "kind = force-path" in manifest

    def test_run_preset_by_name(self, tmp_path, capsys):
        code, _, _ = run_cli(
            ["run", "fig1_force_path", "--out", str(tmp_path), "--override", "n_samples=51"],
            capsys,
        )
        assert code == 0
        assert (tmp_path / "force_path_seed0.csv").is_file()

    def test_seed_flag(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("kind = force-path\nn_samples = 51\n")
        code, _, _ = run_cli(["run", str(cfg), "--out", str(tmp_path), "--seed", "7"], capsys)
        assert code == 0
        assert (tmp_path / "force_path_seed7.csv").is_file()

    def test_determinism_byte_identical(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("kind = force-path\nn_samples = 201\nseeds = 3\n")
        a, b = tmp_path / "a", tmp_path / "b"
        assert run_cli(["run", str(cfg), "--out", str(a)], capsys)[0] == 0
        assert run_cli(["run", str(cfg), "--out", str(b)], capsys)[0] == 0
        assert (a / "force_path_seed3.csv").read_bytes() == (b / "force_path_seed3.csv").read_bytes()
        assert (a / "manifest.txt").read_bytes() == (b / "manifest.txt").read_bytes()

    def test_missing_config_exits_1(self, tmp_path, capsys):
        code, _, stderr = run_cli(["run", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)], capsys)
        assert code == 1
        assert "not found" in stderr

    def test_invalid_config_exits_1(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("kind = shock\ndrift_v2 = 3.0\n")
        code, _, stderr = run_cli(["run", str(cfg), "--out", str(tmp_path)], capsys)
        assert code == 1
        assert "sub-luminality" in stderr

    def test_numerical_failure_exits_2(self, tmp_path, capsys):
        cfg = tmp_path / "sing.cfg"
        cfg.write_text(
            "kind = shock\nseeds = 0\nt0 = 0\nt_end = 400\ndt = 0.5\nx2_0 = -50\n"
            "drift_v1 = 0.0\ndrift_v2 = 0.3\nalpha = 1e-9\nmin_separation = 40.0\n"
            "pre_window = 1, 50\npost_window = 300, 399\n"
        )
        code, _, stderr = run_cli(["run", str(cfg), "--out", str(tmp_path)], capsys)
        assert code == 2
        assert "step floor" in stderr

    def test_bad_override_exits_1(self, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("kind = force-path\n")
        code, _, stderr = run_cli(
            ["run", str(cfg), "--out", str(tmp_path), "--override", "oops"], capsys
        )
        assert code == 1
        assert "key=value" in stderr


class TestPresets:
    def test_list(self, capsys):
        code, stdout, _ = run_cli(["presets", "list"], capsys)
        assert code == 0
        assert "fig8_9_shock" in stdout

    def test_show(self, capsys):
        code, stdout, _ = run_cli(["presets", "show", "fig2_force_dist"], capsys)
        assert code == 0
        assert "kind = force-dist" in stdout

    def test_show_unknown_exits_1(self, capsys):
        code, _, stderr = run_cli(["presets", "show", "fig99"], capsys)
        assert code == 1
        assert "unknown preset" in stderr
