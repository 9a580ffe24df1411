import math

import pytest

from stigmagame import cli

from conftest import PAPER_CFG

GOOD_CFG = PAPER_CFG.read_text(encoding="utf-8")


def write_cfg(tmp_path, text, name="model.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def edited_cfg(**overrides):
    lines = []
    for line in GOOD_CFG.splitlines():
        key = line.split("=")[0].strip()
        if key in overrides:
            lines.append(f"{key} = {overrides.pop(key)}")
        else:
            lines.append(line)
    for key, value in overrides.items():
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


class TestLoadConfig:
    def test_bundled_config_parses(self):
        cfg = cli.load_config(PAPER_CFG)
        p = cfg.params
        assert (p.theta_L, p.theta_H, p.v, p.c) == (0.2, 0.8, 1.0, 0.55)
        assert (p.c_h, p.z, p.u, p.tau_hat) == (1.0, 2.5, 0.1, 0.5)
        assert p.M == 1.0  # defaulted
        assert p.tau_true == 0.0  # defaulted
        assert cfg.convention == "corrected"
        assert p.dist_y.support_hi == 2.0

    def test_unknown_key_rejected(self, tmp_path):
        path = write_cfg(tmp_path, GOOD_CFG + "gamma = 0.5\n")
        with pytest.raises(cli.ConfigError, match="gamma"):
            cli.load_config(path)

    def test_missing_key_rejected(self, tmp_path):
        text = "\n".join(
            line for line in GOOD_CFG.splitlines() if not line.startswith("tau_hat")
        )
        path = write_cfg(tmp_path, text)
        with pytest.raises(cli.ConfigError, match="tau_hat"):
            cli.load_config(path)

    def test_malformed_value_rejected(self, tmp_path):
        path = write_cfg(tmp_path, edited_cfg(v="fast"))
        with pytest.raises(cli.ConfigError, match="'v'"):
            cli.load_config(path)

    def test_duplicate_key_rejected(self, tmp_path):
        path = write_cfg(tmp_path, GOOD_CFG + "v = 2\n")
        with pytest.raises(cli.ConfigError, match="duplicate"):
            cli.load_config(path)

    def test_piecewise_distribution_roundtrip(self, tmp_path):
        knots = tmp_path / "y.csv"
        knots.write_text("x,p\n0,0\n0.5,0.25\n2,1\n", encoding="utf-8")
        path = write_cfg(tmp_path, edited_cfg(dist_y="piecewise:y.csv"))
        cfg = cli.load_config(path)
        assert cfg.params.dist_y.kind == "piecewise_linear_cdf"
        assert cfg.params.dist_y.knots_p == (0.0, 0.25, 1.0)

    def test_missing_knot_file_rejected(self, tmp_path):
        path = write_cfg(tmp_path, edited_cfg(dist_y="piecewise:nope.csv"))
        with pytest.raises(cli.ConfigError, match="dist_y"):
            cli.load_config(path)


class TestExitCodes:
    def test_ok(self, tmp_path, capsys):
        assert cli.main(["check", "--config", str(PAPER_CFG)]) == 0

    def test_config_error_table(self, tmp_path, capsys):
        cases = [
            (GOOD_CFG + "gamma = 0.5\n", "unknown key"),
            (edited_cfg(v="fast"), "malformed"),
            (edited_cfg(c="0.1"), "assumption 1"),  # theta_L*v = 0.2 > c
            (edited_cfg(c="0.9"), "assumption 1"),  # c > theta_H*v = 0.8
            (edited_cfg(theta_L="0.9"), "theta ordering"),
            (edited_cfg(tau_hat="1.5"), "tau range"),
            (edited_cfg(convention="folk"), "bad convention"),
        ]
        for text, label in cases:
            path = write_cfg(tmp_path, text)
            rc = cli.main(["check", "--config", str(path)])
            assert rc == 2, label

    def test_missing_config_file(self, tmp_path):
        assert cli.main(["check", "--config", str(tmp_path / "ghost.cfg")]) == 2

    def test_assumption1_message_names_it(self, tmp_path, capsys):
        path = write_cfg(tmp_path, edited_cfg(c="0.1"))
        assert cli.main(["check", "--config", str(path)]) == 2
        assert "assumption 1" in capsys.readouterr().err

    def test_strict_gap_violation_exits_3(self, tmp_path, capsys):
        path = write_cfg(tmp_path, edited_cfg(c_h="0.3"))
        assert cli.main(["check", "--config", str(path), "--strict"]) == 3
        assert "assumption 3" in capsys.readouterr().err

    def test_gap_violation_without_strict_reports(self, tmp_path, capsys):
        path = write_cfg(tmp_path, edited_cfg(c_h="0.3"))
        assert cli.main(["check", "--config", str(path)]) == 0
        assert "VIOLATED" in capsys.readouterr().out

    def test_gap_violation_blocks_evaluate(self, tmp_path, capsys):
        path = write_cfg(tmp_path, edited_cfg(c_h="0.3"))
        rc = cli.main(
            ["evaluate", "--config", str(path), "--out", str(tmp_path)]
        )
        assert rc == 3

    def test_bad_flag_values(self, tmp_path):
        args = ["sweep", "--config", str(PAPER_CFG), "--out", str(tmp_path)]
        assert cli.main(args + ["--grid", "1"]) == 2
        assert cli.main(args + ["--tol", "0"]) == 2
        assert cli.main(args + ["--pairs", "0"]) == 2
        assert cli.main(args + ["--tau", "1.5"]) == 2


class TestEvaluate:
    def test_defaults_echoed(self, capsys):
        assert cli.main(["evaluate", "--config", str(PAPER_CFG)]) == 0
        out = capsys.readouterr().out
        assert "M = 1" in out
        assert "tau_hat,S,gap,H,r,R_H,R,W_A,W_B,W" in out

    def test_round_trip_against_sweep(self, tmp_path, capsys):
        assert (
            cli.main(
                [
                    "sweep",
                    "--config",
                    str(PAPER_CFG),
                    "--grid",
                    "11",
                    "--out",
                    str(tmp_path),
                ]
            )
            == 0
        )
        capsys.readouterr()
        sweep_lines = (tmp_path / "sweep.csv").read_text().splitlines()[1:]
        for i, expected in enumerate(sweep_lines):
            tau = i / 10
            rc = cli.main(["evaluate", "--config", str(PAPER_CFG), "--tau", str(tau)])
            assert rc == 0
            got = capsys.readouterr().out.strip().splitlines()[-1]
            assert got == expected


class TestArtifacts:
    def test_sweep_rerun_is_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            rc = cli.main(
                ["sweep", "--config", str(PAPER_CFG), "--grid", "51", "--out", str(out)]
            )
            assert rc == 0
        assert (out1 / "sweep.csv").read_bytes() == (out2 / "sweep.csv").read_bytes()

    def test_simulate_rerun_is_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            rc = cli.main(
                [
                    "simulate",
                    "--config",
                    str(PAPER_CFG),
                    "--pairs",
                    "20000",
                    "--seed",
                    "99",
                    "--out",
                    str(out),
                ]
            )
            assert rc == 0
        assert (out1 / "sim.csv").read_bytes() == (out2 / "sim.csv").read_bytes()

    def test_simulate_csv_carries_targets(self, tmp_path):
        rc = cli.main(
            [
                "simulate",
                "--config",
                str(PAPER_CFG),
                "--pairs",
                "20000",
                "--seed",
                "99",
                "--out",
                str(tmp_path),
            ]
        )
        assert rc == 0
        header, row = (tmp_path / "sim.csv").read_text().splitlines()
        cols = dict(zip(header.split(","), row.split(",")))
        assert cols["S_analytic"] == "0.5"
        assert float(cols["r_analytic"]) == pytest.approx(512.0 / 8281.0, abs=1e-10)
        assert int(cols["n_pairs"]) == 20000

    def test_optimize_prints_and_traces(self, tmp_path, capsys):
        rc = cli.main(
            ["optimize", "--config", str(PAPER_CFG), "--out", str(tmp_path)]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "tau_star" in out and "W_star" in out
        trace = (tmp_path / "optimize_trace.csv").read_text().splitlines()
        assert trace[0] == "stage,tau_hat,W"
        assert any(line.startswith("refine") for line in trace)

    def test_optimize_trace_rerun_is_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert (
                cli.main(["optimize", "--config", str(PAPER_CFG), "--out", str(out)])
                == 0
            )
        assert (out1 / "optimize_trace.csv").read_bytes() == (
            out2 / "optimize_trace.csv"
        ).read_bytes()

    def test_figures_outputs(self, tmp_path):
        rc = cli.main(
            [
                "figures",
                "--config",
                str(PAPER_CFG),
                "--grid",
                "41",
                "--out",
                str(tmp_path),
                "--svg",
            ]
        )
        assert rc == 0
        for n in range(1, 6):
            assert (tmp_path / f"fig{n}.csv").is_file()
            svg = (tmp_path / f"fig{n}.svg").read_text()
            assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")

    def test_fig5_full_stigma_beats_none(self, tmp_path):
        rc = cli.main(
            [
                "figures",
                "--config",
                str(PAPER_CFG),
                "--grid",
                "41",
                "--out",
                str(tmp_path),
            ]
        )
        assert rc == 0
        lines = (tmp_path / "fig5.csv").read_text().splitlines()
        assert lines[0] == "# convention = corrected"
        header = lines[1].split(",")
        first = dict(zip(header, lines[2].split(",")))
        last = dict(zip(header, lines[-1].split(",")))
        assert float(first["tau_hat"]) == 0.0
        assert float(last["tau_hat"]) == 1.0
        assert float(last["W_demeaned"]) > float(first["W_demeaned"])

    def test_fig5_honours_convention_flag(self, tmp_path):
        rc = cli.main(
            [
                "figures",
                "--config",
                str(PAPER_CFG),
                "--grid",
                "21",
                "--out",
                str(tmp_path),
                "--convention",
                "paper",
            ]
        )
        assert rc == 0
        lines = (tmp_path / "fig5.csv").read_text().splitlines()
        assert lines[0] == "# convention = paper_literal"
        header = lines[1].split(",")
        first = dict(zip(header, lines[2].split(",")))
        last = dict(zip(header, lines[-1].split(",")))
        # under the literal bookkeeping full stigma loses to none
        assert float(last["W_demeaned"]) < float(first["W_demeaned"])

    def test_figures_rerun_is_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            rc = cli.main(
                [
                    "figures",
                    "--config",
                    str(PAPER_CFG),
                    "--grid",
                    "21",
                    "--out",
                    str(out),
                    "--svg",
                ]
            )
            assert rc == 0
        for n in range(1, 6):
            assert (out1 / f"fig{n}.csv").read_bytes() == (
                out2 / f"fig{n}.csv"
            ).read_bytes()
            assert (out1 / f"fig{n}.svg").read_bytes() == (
                out2 / f"fig{n}.svg"
            ).read_bytes()
