import pytest
from click.testing import CliRunner

from cevsim.cli import main, read_config


@pytest.fixture
def runner():
    return CliRunner()


class TestConfigFile:
    def test_parse(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# comment\nmu = -1\nsigma=1.0\neps = 1e-4,1e-6  # inline\n")
        parsed = read_config(cfg)
        assert parsed == {"mu": "-1", "sigma": "1.0", "eps": "1e-4,1e-6"}

    def test_flags_override_file(self, runner, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("mu = -1\nsigma = 1\np = 0.5\nx0 = 0.25\nT = 1\nn = 50\nN = 20\nseed = 5\n")
        out = tmp_path / "a.csv"
        res = runner.invoke(main, ["ruin", "--config", str(cfg), "-N", "10",
                                   "--out", str(out)])
        assert res.exit_code == 0, res.output
        assert "n_paths" in out.read_text()
        assert ",10," in out.read_text().splitlines()[-1]


class TestRuin:
    def test_csv_written_and_reproducible(self, runner, tmp_path):
        args = ["ruin", "--mu", "-1", "--x0", "0.25", "-T", "1", "-n", "100",
                "-N", "50", "--seed", "3", "--eps", "1e-4,1e-6"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert runner.invoke(main, args + ["--out", str(a)]).exit_code == 0
        assert runner.invoke(main, args + ["--out", str(b), "--workers", "4"]).exit_code == 0
        assert a.read_text() == b.read_text()

    def test_no_ruin_brackets(self, runner):
        res = runner.invoke(main, ["ruin", "--mu", "1", "--sigma", "1e-15",
                                   "--x0", "1", "-T", "1", "-n", "50", "-N", "20",
                                   "--seed", "1", "--eps", "1e-4"])
        assert res.exit_code == 0
        row = res.output.strip().splitlines()[-1].split(",")
        assert float(row[1]) == pytest.approx(-1e-4)
        assert float(row[2]) == pytest.approx(1e-4)

    def test_usage_error_exit_code(self, runner):
        res = runner.invoke(main, ["ruin", "--sigma", "0", "-n", "10", "-N", "5"])
        assert res.exit_code == 2

    def test_invalid_config_line(self, runner, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("mu -1\n")
        res = runner.invoke(main, ["ruin", "--config", str(cfg)])
        assert res.exit_code == 2


class TestTables:
    def test_all_cases_emitted(self, runner, tmp_path):
        out = tmp_path / "tables"
        res = runner.invoke(main, ["tables", "--out-dir", str(out), "-N", "30",
                                   "-n", "200", "--seed", "2"])
        assert res.exit_code == 0, res.output
        files = sorted(p.name for p in out.glob("case*.csv"))
        assert files == [f"case{i}.csv" for i in range(1, 9)]
        summary = (out / "summary.csv").read_text().splitlines()
        assert len(summary) == 9
        assert "corrupted" in summary[-1]  # case 8 anomaly note
        assert "corrupted" in res.stderr


class TestLemmaCheck:
    def test_passes(self, runner):
        res = runner.invoke(main, ["lemma-check", "--seed", "1"])
        assert res.exit_code == 0, res.output
        assert "holder_gap_sweep" in res.output
        assert "pass=True" in res.output


class TestOracleCheck:
    def test_small_run(self, runner):
        res = runner.invoke(main, ["oracle-check", "--mu", "-1", "--x0", "0.25",
                                   "-T", "3", "-n", "200", "-N", "400",
                                   "--seed", "4", "--fine-factor", "5"])
        assert res.exit_code == 0, res.output
        assert "pass=True" in res.output


class TestDiagnosticsCmd:
    def test_report(self, runner):
        res = runner.invoke(main, ["diagnostics", "--mu", "-1", "--x0", "0.25",
                                   "-T", "3", "-n", "500", "-N", "200",
                                   "--seed", "6", "--audit-paths", "50"])
        assert res.exit_code == 0, res.output
        assert "path_audit: failures=0/50 pass=True" in res.output
        assert "holder_gap_sweep" in res.output
