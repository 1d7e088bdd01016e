"""End-to-end tests of the command-line interface."""

import json
import math

import numpy as np
import pytest

from lossykerr.cli import main, parse_axis
from lossykerr.metrics import poisson_entropy
from lossykerr.sweep import read_sweep


def run(tmp_path, *argv):
    return main([str(a) for a in argv])


class TestParseAxis:
    def test_plain_numbers(self):
        assert parse_axis(["1", "2.5"]) == [1.0, 2.5]

    def test_linear_range(self):
        assert parse_axis(["0:1:5"]) == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])

    def test_log_range(self):
        assert parse_axis(["log:1e-2:1:3"]) == pytest.approx([1e-2, 1e-1, 1.0])

    def test_mixed(self):
        assert parse_axis(["7", "0:1:2"]) == pytest.approx([7.0, 0.0, 1.0])


class TestQfunc:
    def test_vacuum_grid(self, tmp_path, capsys):
        out = tmp_path / "qf"
        assert run(tmp_path, "qfunc", "--tau", "0.5", "--kappa", "0.0",
                   "--tau-nbar", "0", "--grid", "61", "--out", out,
                   "--no-plot") == 0
        data = read_sweep(tmp_path / "qf_tn0.csv")
        assert data.columns == ("re", "im", "q")
        assert len(data.rows) == 61 * 61
        q = {(r[0], r[1]): r[2] for r in data.rows}
        assert q[(0.0, 0.0)] == pytest.approx(1 / math.pi, rel=1e-12)
        assert max(r[2] for r in data.rows) <= 1 / math.pi + 1e-12
        cell = (10.0 / 60.0) ** 2
        assert sum(r[2] for r in data.rows) * cell == pytest.approx(1.0, abs=1e-3)

    def test_one_file_per_intensity_with_plots(self, tmp_path):
        out = tmp_path / "qf"
        assert run(tmp_path, "qfunc", "--tau", "1e-8", "--kappa", "5e-6",
                   "--tau-nbar", "1", "3", "--grid", "41", "--out", out) == 0
        for token in ("tn1", "tn3"):
            assert (tmp_path / f"qf_{token}.csv").exists()
            assert (tmp_path / f"qf_{token}.meta.json").exists()
            assert (tmp_path / f"qf_{token}.png").exists()

    def test_ring_spreads_with_intensity(self, tmp_path):
        # compact blob at low intensity, diffused ring at high intensity
        out = tmp_path / "qf"
        assert run(tmp_path, "qfunc", "--tau", "1e-8", "--kappa", "5e-6",
                   "--tau-nbar", "1", "60", "--grid", "81", "--out", out,
                   "--no-plot", "--jobs", "2") == 0

        def arc_extent(path, tau_nbar):
            data = read_sweep(path)
            radius = math.sqrt(tau_nbar)
            rows = [r for r in data.rows
                    if abs(math.hypot(r[0], r[1]) - radius) < 0.6]
            qmax = max(r[2] for r in rows)
            angles = sorted(math.atan2(r[1], r[0]) for r in rows
                            if r[2] > qmax / 4)
            return (max(angles) - min(angles)) * radius, data

        low, _ = arc_extent(tmp_path / "qf_tn1.csv", 1.0)
        high, data60 = arc_extent(tmp_path / "qf_tn60.csv", 60.0)
        # tangential footprint grows strongly with intensity (blob -> arc)
        assert high > 5 * low
        # but the state stays a ring, not a disk: nothing near the origin
        center = {(r[0], r[1]): r[2] for r in data60.rows}[(0.0, 0.0)]
        assert center < 1e-6 * max(r[2] for r in data60.rows)

    def test_failure_emits_error_json(self, tmp_path, capsys):
        out = tmp_path / "qf"
        code = run(tmp_path, "qfunc", "--tau", "0.5", "--kappa", "0",
                   "--tau-nbar", "4000", "--dim-cap", "64", "--out", out,
                   "--no-plot")
        assert code == 3
        err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert err["error"]["exit_code"] == 3


class TestFfunc:
    def test_dip_and_zero_row(self, tmp_path):
        out = tmp_path / "ff"
        assert run(tmp_path, "ffunc", "--tau", "1e-8", "0.8",
                   "--kappa=-30:30:121", "--out", out, "--no-plot") == 0
        data = read_sweep(tmp_path / "ff_tau1em08.csv")
        assert data.columns == ("kappa", "re_f", "im_f", "re_f_quad", "im_f_quad")
        byk = {r[0]: r for r in data.rows}
        assert byk[0.0][1:] == (0.0, 0.0, 0.0, 0.0)
        # dip centered at zero: the real part rises toward 1 - tau away from 0
        assert byk[0.0][1] == min(r[1] for r in data.rows)
        assert byk[30.0][1] > 0.99 * (1 - 1e-8)

    def test_quadratic_tracks_exact_near_zero(self, tmp_path):
        out = tmp_path / "ff"
        assert run(tmp_path, "ffunc", "--tau", "0.8",
                   "--kappa=-0.01:0.01:11", "--out", out, "--no-plot") == 0
        data = read_sweep(tmp_path / "ff_tau0p8.csv")
        for _, re_f, im_f, re_q, im_q in data.rows:
            assert abs(re_f - re_q) < 1e-5
            assert abs(im_f - im_q) < 1e-5


class TestInfidelity:
    def test_heatmap_rows(self, tmp_path):
        out = tmp_path / "inf"
        assert run(tmp_path, "infidelity", "--tau", "0.8",
                   "--kappa", "0", "0.15", "0.3", "--tau-nbar", "2", "8", "30",
                   "--out", out, "--no-plot") == 0
        data = read_sweep(tmp_path / "inf.csv")
        assert data.columns == ("kappa", "tau_nbar", "one_minus_f", "error")
        vals = {(r[0], r[1]): r[2] for r in data.rows}
        assert all(v <= 1e-10 for (k, _), v in vals.items() if k == 0.0)
        assert all(0.0 <= v <= 1.0 for v in vals.values())
        # the largest infidelity sits in the high-kappa, moderate-intensity corner
        worst = max(vals, key=vals.get)
        assert worst[0] == 0.3


class TestHolevo:
    def test_shapes_and_reference_value(self, tmp_path):
        out = tmp_path / "ho"
        assert run(tmp_path, "holevo", "--tau", "1e-8",
                   "--kappa", "0", "5e-6", "--tau-nbar", "log:1:60:6",
                   "--out", out, "--no-plot", "--jobs", "2") == 0
        data = read_sweep(tmp_path / "ho.csv")
        assert data.columns == ("kappa", "tau_nbar", "chi_bits", "S_avg", "S_member")
        linear = [r for r in data.rows if r[0] == 0.0]
        nonlin = [r for r in data.rows if r[0] > 0.0]
        # linear channel: strictly increasing chi
        chis = [r[2] for r in linear]
        assert all(a < b for a, b in zip(chis, chis[1:]))
        # kappa=0, tau_nbar=1 reproduces the Poisson entropy
        assert linear[0][2] == pytest.approx(poisson_entropy(1.0), abs=1e-6)
        # nonlinear channel: interior maximum on this grid
        chis_nl = [r[2] for r in nonlin]
        peak = int(np.argmax(chis_nl))
        assert 0 < peak < len(chis_nl) - 1
        # nonlinearity never helps pointwise
        for lin_row, nl_row in zip(linear, nonlin):
            assert nl_row[2] <= lin_row[2] + 1e-9

    def test_exact_variant(self, tmp_path):
        out = tmp_path / "hoe"
        assert run(tmp_path, "holevo", "--tau", "0.8", "--kappa", "0.01",
                   "--tau-nbar", "5", "--variant", "exact",
                   "--out", out, "--no-plot") == 0
        data = read_sweep(tmp_path / "hoe.csv")
        assert data.rows[0][2] > 0.0


class TestSqueezing:
    def test_curve_shape(self, tmp_path):
        out = tmp_path / "sq"
        assert run(tmp_path, "squeezing", "--nbar", "1e8",
                   "--tau", "0.5", "0.95", "--kappa", "log:1e-12:1e-4:41",
                   "--out", out, "--no-plot") == 0
        data = read_sweep(tmp_path / "sq.csv")
        assert data.columns == ("tau", "kappa", "sinh_r", "var_min",
                                "plateau_estimate")
        by_tau = {}
        for r in data.rows:
            by_tau.setdefault(r[0], []).append(r)
        # vanishing nonlinearity end is vacuum limited
        for tau, rows in by_tau.items():
            assert rows[0][3] == pytest.approx(1.0, abs=1e-3)
        # the transmission closest to one squeezes deepest
        assert min(r[3] for r in by_tau[0.95]) < min(r[3] for r in by_tau[0.5])

    def test_rejects_tau_one(self, tmp_path, capsys):
        code = run(tmp_path, "squeezing", "--nbar", "1e8", "--tau", "1.0",
                   "--kappa", "1e-6", "--out", tmp_path / "x", "--no-plot")
        assert code == 2


class TestOracleCheck:
    def test_pass_and_report(self, tmp_path, capsys):
        out = tmp_path / "oracle"
        assert run(tmp_path, "oracle-check", "--tau", "0.8", "--kappa", "0.1",
                   "--nbar", "5", "--out", out) == 0
        captured = capsys.readouterr().out
        assert "PASS" in captured
        report = json.loads((tmp_path / "oracle.json").read_text())
        assert report["passed"] is True
        assert report["max_deviation"] < 1e-8
        assert report["rk4_steps"] >= 2

    def test_trivial_linear_channel(self, tmp_path, capsys):
        assert run(tmp_path, "oracle-check", "--tau", "0.5", "--kappa", "0",
                   "--nbar", "2") == 0
        assert "PASS" in capsys.readouterr().out

    def test_nonconvergence_distinct_exit(self, tmp_path, capsys):
        code = run(tmp_path, "oracle-check", "--tau", "0.5", "--kappa", "0.1",
                   "--nbar", "5", "--steps", "1", "--max-doublings", "0")
        assert code == 3
        err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert err["error"]["type"] == "ConvergenceError"

    def test_desk_scale_guard(self, tmp_path, capsys):
        code = run(tmp_path, "oracle-check", "--tau", "0.9", "--kappa", "0.1",
                   "--nbar", "1e6")
        assert code == 2


class TestDeterminism:
    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_serial_parallel_byte_identical(self, tmp_path, fmt):
        args = ["infidelity", "--tau", "0.8", "--kappa", "0", "0.2",
                "--tau-nbar", "2", "6", "--format", fmt, "--no-plot"]
        assert run(tmp_path, *args, "--out", tmp_path / "a", "--jobs", "1") == 0
        assert run(tmp_path, *args, "--out", tmp_path / "b", "--jobs", "2") == 0
        a = (tmp_path / f"a.{fmt}").read_bytes()
        b = (tmp_path / f"b.{fmt}").read_bytes()
        assert a == b

    def test_repeated_runs_byte_identical(self, tmp_path):
        args = ["holevo", "--tau", "0.5", "--kappa", "0", "--tau-nbar", "1", "4",
                "--no-plot"]
        assert run(tmp_path, *args, "--out", tmp_path / "r1") == 0
        assert run(tmp_path, *args, "--out", tmp_path / "r2") == 0
        assert (tmp_path / "r1.csv").read_bytes() == (tmp_path / "r2.csv").read_bytes()


class TestUsageErrors:
    def test_bad_tau(self, tmp_path, capsys):
        code = run(tmp_path, "infidelity", "--tau", "1.5", "--kappa", "0",
                   "--tau-nbar", "1", "--out", tmp_path / "x", "--no-plot")
        assert code == 2
        err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert err["error"]["type"] == "UsageError"

    def test_unknown_subcommand(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2
