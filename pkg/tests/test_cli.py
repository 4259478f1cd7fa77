"""Tests for CLI: subcommands, exit codes, config and report output."""

import json

import pytest
import yaml
from click.testing import CliRunner

from clatool.catalog import catalog_path
from clatool.cli import EXIT_CAP, EXIT_FAILED, EXIT_INPUT, main
from clatool.parsers import load_array
from clatool.verify import verify_cla


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def phone_path():
    return str(catalog_path("phone"))


class TestHelp:
    def test_help(self, runner):
        result = runner.invoke(main, ["--help"])
        assert result.exit_code == 0
        assert "constrained locating arrays" in result.output

    def test_version(self, runner):
        from clatool import __version__

        result = runner.invoke(main, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.output


class TestValidate:
    def test_phone(self, runner, phone_path):
        result = runner.invoke(main, ["validate", phone_path])
        assert result.exit_code == 0
        assert "k = 5" in result.output
        assert "valid tests = 31" in result.output
        assert "invalid 2-way interactions: 10" in result.output
        assert "(Email=0, Camera=0)" in result.output

    def test_catalog_name(self, runner):
        result = runner.invoke(main, ["validate", "phone"])
        assert result.exit_code == 0

    def test_bad_model(self, runner, tmp_path):
        path = tmp_path / "bad.model"
        path.write_text("factor F1 { 0, 1 }\nconstraint F1 = 5\n")
        result = runner.invoke(main, ["validate", str(path)])
        assert result.exit_code == EXIT_INPUT
        assert "unknown value '5'" in result.output


class TestVerify:
    def test_pass(self, runner, phone_path, fixtures_dir):
        result = runner.invoke(main, [
            "verify", phone_path, str(fixtures_dir / "fig4.array"),
            "--kind", "cla", "--d", "1", "--t", "1",
        ])
        assert result.exit_code == 0
        assert result.output.splitlines()[0] == "PASS"

    def test_fail(self, runner, phone_path, fixtures_dir):
        result = runner.invoke(main, [
            "verify", phone_path, str(fixtures_dir / "fig2.array"), "--kind", "cca", "--t", "2",
        ])
        assert result.exit_code == EXIT_FAILED
        assert result.output.splitlines()[0] == "FAIL: row 0 violates constraints"

    def test_unconstrained(self, runner, phone_path, fixtures_dir):
        result = runner.invoke(main, [
            "verify", phone_path, str(fixtures_dir / "fig2.array"), "--t", "2", "--unconstrained",
        ])
        assert result.exit_code == 0

    def test_json_report(self, runner, phone_path, fixtures_dir, tmp_path):
        report_path = tmp_path / "report.json"
        result = runner.invoke(main, [
            "verify", phone_path, str(fixtures_dir / "fig7.array"),
            "--d", "2", "--bar-d", "--t", "2", "--bar-t",
            "--format", "json", "--report", str(report_path),
        ])
        assert result.exit_code == 0
        data = json.loads(report_path.read_text())
        assert data["passed"] is True
        assert data["params"] == {"d": 2, "bar_d": True, "t": 2, "bar_t": True}

    def test_yaml_format(self, runner, phone_path, fixtures_dir):
        result = runner.invoke(main, [
            "verify", phone_path, str(fixtures_dir / "fig4.array"), "--t", "1", "--format", "yaml",
        ])
        assert result.exit_code == 0
        assert yaml.safe_load(result.output)["kind"] == "cla"

    def test_cap_exceeded(self, runner, phone_path, fixtures_dir):
        result = runner.invoke(main, [
            "verify", phone_path, str(fixtures_dir / "fig7.array"),
            "--d", "2", "--bar-d", "--t", "2", "--bar-t", "--cap-universe", "10",
        ])
        assert result.exit_code == EXIT_CAP
        assert "too large to verify" in result.output

    def test_cap_from_environment(self, runner, phone_path, fixtures_dir):
        result = runner.invoke(
            main,
            ["verify", phone_path, str(fixtures_dir / "fig7.array"), "--d", "2", "--bar-d", "--t", "2"],
            env={"CLATOOL_CAP_UNIVERSE": "10"},
        )
        assert result.exit_code == EXIT_CAP

    def test_array_mismatch(self, runner, phone_path, tmp_path):
        path = tmp_path / "bad.array"
        path.write_text("Display,Email\n0,0\n")
        result = runner.invoke(main, ["verify", phone_path, str(path), "--t", "1"])
        assert result.exit_code == EXIT_INPUT


class TestGenerate:
    def test_gen_cla(self, runner, phone_path, phone, tmp_path):
        output = tmp_path / "cla.array"
        report_path = tmp_path / "report.json"
        result = runner.invoke(main, [
            "gen-cla", phone_path, "--t", "2", "--runs", "2",
            "-o", str(output), "--report", str(report_path),
        ])
        assert result.exit_code == 0, result.output
        assert "Reduction report" in result.output
        array = load_array(output, phone)
        assert verify_cla(phone, array, 1, 2, bar_d=True, bar_t=True).passed
        assert json.loads(report_path.read_text())["output_size"] == len(array)

    def test_gen_cla_is_reproducible(self, runner, phone_path, tmp_path):
        outputs = []
        for name in ("a.array", "b.array"):
            path = tmp_path / name
            result = runner.invoke(main, [
                "gen-cla", phone_path, "--t", "1", "--runs", "2", "--seed", "3", "-o", str(path),
            ])
            assert result.exit_code == 0
            outputs.append(path.read_bytes())
        assert outputs[0] == outputs[1]

    def test_gen_cca(self, runner, phone_path, tmp_path):
        output = tmp_path / "cca.array"
        result = runner.invoke(main, ["gen-cca", phone_path, "--t", "2", "-o", str(output)])
        assert result.exit_code == 0
        verify = runner.invoke(main, ["verify", phone_path, str(output), "--kind", "cca", "--t", "2"])
        assert verify.exit_code == 0

    def test_seed_from_config(self, runner, phone_path, tmp_path):
        config = tmp_path / "config.yaml"
        config.write_text("seed: 4\n")
        via_config = runner.invoke(main, ["--config", str(config), "gen-cca", phone_path, "--t", "2"])
        via_flag = runner.invoke(main, ["gen-cca", phone_path, "--t", "2", "--seed", "4"])
        assert via_config.exit_code == 0
        assert via_config.output == via_flag.output



class TestGlobalOptions:
    def test_seed_on_group(self, runner, phone_path):
        via_group = runner.invoke(main, ["--seed", "4", "gen-cca", phone_path, "--t", "2"])
        via_command = runner.invoke(main, ["gen-cca", phone_path, "--t", "2", "--seed", "4"])
        assert via_group.exit_code == 0
        assert via_group.output == via_command.output

    def test_command_option_wins(self, runner, phone_path):
        overridden = runner.invoke(main, [
            "--seed", "4", "gen-cca", phone_path, "--t", "2", "--seed", "0",
        ])
        default = runner.invoke(main, ["gen-cca", phone_path, "--t", "2"])
        assert overridden.exit_code == 0
        assert overridden.output == default.output

    def test_cap_universe_on_group(self, runner, phone_path, fixtures_dir):
        result = runner.invoke(main, [
            "--cap-universe", "10", "verify", phone_path, str(fixtures_dir / "fig7.array"),
            "--d", "2", "--bar-d", "--t", "2",
        ])
        assert result.exit_code == EXIT_CAP

    def test_format_on_group(self, runner, phone_path, fixtures_dir):
        result = runner.invoke(main, [
            "--format", "json", "verify", phone_path, str(fixtures_dir / "fig4.array"), "--t", "1",
        ])
        assert result.exit_code == 0
        assert json.loads(result.output)["kind"] == "cla"

class TestDistinguish:
    def test_text(self, runner, phone_path):
        result = runner.invoke(main, ["distinguish", phone_path, "--d", "1", "--t", "2"])
        assert result.exit_code == 0
        assert "{(Display=0, Camera=0)}  ~  {(Email=2, Camera=0)}" in result.output
        assert result.output.splitlines()[-1] == "3 indistinguishable pairs"

    def test_json(self, runner, phone_path):
        result = runner.invoke(main, [
            "distinguish", phone_path, "--d", "2", "--bar-d", "--t", "1", "--format", "json",
        ])
        assert result.exit_code == 0
        assert json.loads(result.output)["count"] == 15


class TestLocate:
    def test_single_fault(self, runner, phone_path, fixtures_dir, tmp_path):
        outcomes = tmp_path / "outcomes.txt"
        outcomes.write_text("fail\n" + "pass\n" * 14)
        result = runner.invoke(main, [
            "locate", phone_path, str(fixtures_dir / "fig2.array"), str(outcomes),
            "--t", "2", "--unconstrained",
        ])
        assert result.exit_code == 0
        assert "{(Email=0, Camera=0)}" in result.output

    def test_unexplained(self, runner, phone_path, fixtures_dir, tmp_path):
        outcomes = tmp_path / "outcomes.txt"
        outcomes.write_text("fail\n" * 5)
        result = runner.invoke(main, [
            "locate", phone_path, str(fixtures_dir / "fig4.array"), str(outcomes), "--t", "1",
        ])
        assert result.exit_code == EXIT_FAILED
        assert "UNEXPLAINED" in result.output

    def test_length_mismatch(self, runner, phone_path, fixtures_dir, tmp_path):
        outcomes = tmp_path / "outcomes.txt"
        outcomes.write_text("pass\n" * 14)
        result = runner.invoke(main, [
            "locate", phone_path, str(fixtures_dir / "fig2.array"), str(outcomes), "--t", "2",
        ])
        assert result.exit_code == EXIT_INPUT
        assert "length mismatch" in result.output



class TestUndecodableInput:
    def test_model(self, runner, tmp_path):
        model = tmp_path / "latin1.model"
        model.write_bytes(b"# caf\xe9\nfactor A { 0, 1 }\n")
        result = runner.invoke(main, ["validate", str(model)])
        assert result.exit_code == EXIT_INPUT
        assert "not valid UTF-8" in result.output

    def test_array(self, runner, phone_path, tmp_path):
        array = tmp_path / "latin1.array"
        array.write_bytes(b"Display,Email,Camera,VideoCamera,VideoRingtones\n# \xe9\n0,0,1,0,0\n")
        result = runner.invoke(main, ["verify", phone_path, str(array), "--t", "1"])
        assert result.exit_code == EXIT_INPUT
        assert "latin1.array" in result.output

    def test_outcomes(self, runner, phone_path, fixtures_dir, tmp_path):
        outcomes = tmp_path / "outcomes.txt"
        outcomes.write_bytes(b"fail\xe9\n" + b"pass\n" * 14)
        result = runner.invoke(main, [
            "locate", phone_path, str(fixtures_dir / "fig2.array"), str(outcomes), "--t", "2",
        ])
        assert result.exit_code == EXIT_INPUT
        assert "not valid UTF-8" in result.output

    def test_config(self, runner, phone_path, tmp_path):
        config = tmp_path / "config.yaml"
        config.write_bytes(b"seed: 4 # \xe9\n")
        result = runner.invoke(main, ["--config", str(config), "gen-cca", phone_path, "--t", "2"])
        assert result.exit_code == EXIT_INPUT
        assert "Cannot parse config file" in result.output

class TestMinSize:
    def test_tiny_model(self, runner, tmp_path):
        model = tmp_path / "tiny.model"
        model.write_text("factor A { 0, 1 }\nfactor B { 0, 1 }\nconstraint A = 1 => B = 1\n")
        result = runner.invoke(main, ["min-size", str(model), "--t", "1", "--bar-d", "--bar-t"])
        assert result.exit_code == 0
        assert "minimal size: 3" in result.output

    def test_budget(self, runner, phone_path):
        result = runner.invoke(main, [
            "min-size", phone_path, "--t", "2", "--bar-d", "--bar-t", "--budget", "100",
        ])
        assert result.exit_code == EXIT_CAP


class TestSelftest:
    def test_small_corpus(self, runner):
        result = runner.invoke(main, ["selftest", "--models", "4", "--format", "json"])
        assert result.exit_code == 0, result.output
        assert '"passed": true' in result.output
