import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from noisytele.cli import (
    SweepConfig,
    SweepRow,
    compute_row,
    emit_figure_data,
    load_config_file,
    main,
    render_rows,
    run_sweep,
)
from noisytele.qstate import matrix_from_json

MU_STAR = math.log(3) / 8
NU_STAR = math.log(1 + math.sqrt(2)) / 2
COLUMNS = [
    "kappa_t",
    "avg_fidelity_quadrature",
    "avg_fidelity_closed",
    "concurrence",
    "eof",
    "groverian",
    "ppt_min_eig",
]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestSweepConfig:
    def test_default_grid(self):
        kts = SweepConfig("x").kappa_ts()
        assert len(kts) == 101 and kts[0] == 0.0 and kts[-1] == 1.0
        assert kts[30] == 0.3

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"kt_min": -0.1},
            {"kt_step": 0},
            {"kt_max": 0.0},
            {"outputs": frozenset({"entropy"})},
            {"format": "xml"},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SweepConfig("x", **kwargs)


class TestRunSweep:
    def test_same_axis_concurrence(self):
        rows = list(run_sweep(SweepConfig("x", 0.0, 1.0, 0.05)))
        assert [r.kappa_t for r in rows] == sorted(r.kappa_t for r in rows)
        for r in rows:
            assert r.concurrence == pytest.approx(math.exp(-4 * r.kappa_t), abs=1e-10)
            assert r.consistent

    def test_isotropic_hits_zero(self):
        rows = list(run_sweep(SweepConfig("iso")))
        first = next(r.kappa_t for r in rows if r.kappa_t >= MU_STAR)
        for r in rows:
            assert (r.concurrence == 0) == (r.kappa_t >= first)

    def test_w_sweep(self, capsys):
        rows = list(run_sweep(SweepConfig("w")))
        f = [r.avg_fidelity_closed for r in rows]
        assert f[0] == pytest.approx(1.0) and np.all(np.diff(f) < 0) and f[-1] > 7 / 12
        assert all(r.concurrence is None and r.avg_fidelity_quadrature is None for r in rows)
        main(["sweep", "--noise", "w", "--kt-max", "0.02"])
        assert "null" in capsys.readouterr().err

    def test_row_consistency_flag(self):
        good = compute_row("xz", 0.2)
        bad = SweepRow(0.2, good.avg_fidelity_closed + 1e-6, good.avg_fidelity_closed, 0, 0, 0, 0)
        assert good.consistent and not bad.consistent

    def test_render_is_deterministic(self):
        cfg = SweepConfig("xz", 0.0, 0.3, 0.1)
        a = render_rows(run_sweep(cfg), cfg.outputs)
        b = render_rows(run_sweep(cfg), cfg.outputs)
        assert a == b and "\r" not in a
        assert a.splitlines()[0] == ",".join(COLUMNS)


class TestCommands:
    def test_sweep_csv(self, capsys):
        code, out, _ = run(capsys, "sweep", "--noise", "x", "--kt-max", "0.2", "--kt-step", "0.05")
        assert code == 0
        rows = read_csv(out)
        assert list(rows[0]) == COLUMNS and len(rows) == 5
        assert float(rows[2]["concurrence"]) == pytest.approx(math.exp(-0.4), abs=1e-11)

    def test_sweep_outputs_subset_json(self, capsys):
        code, out, _ = run(capsys, "sweep", "--noise", "iso", "--kt-max", "0.1", "--outputs", "concurrence,ppt", "--format", "json")
        assert code == 0
        data = json.loads(out)
        assert list(data[0]) == ["kappa_t", "concurrence", "ppt_min_eig"]

    def test_sweep_w_nulls(self, capsys):
        code, out, err = run(capsys, "--format", "json", "sweep", "--noise", "w", "--kt-max", "0.05")
        assert code == 0 and "W channel" in err
        assert json.loads(out)[1]["concurrence"] is None

    def test_sweep_to_file_is_byte_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            assert run(capsys, "sweep", "--noise", "xy", "--kt-max", "0.5", "--out", str(p))[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_fidelity(self, capsys):
        code, out, _ = run(capsys, "fidelity", "--noise", "xz", "--kt", "0.3", "--grid", "16x16")
        d = json.loads(out)
        assert code == 0 and d["quadrature"] == pytest.approx(d["closed_form"], abs=1e-10)

    def test_fidelity_csv(self, capsys):
        code, out, _ = run(capsys, "fidelity", "--noise", "iso", "--kt", "0.1", "--format", "csv")
        assert code == 0 and read_csv(out)[0]["noise"] == "iso"

    def test_threshold(self, capsys):
        _, out, _ = run(capsys, "threshold", "--noise", "iso")
        d = json.loads(out)
        assert d["kappa_t"] == pytest.approx(MU_STAR, abs=1e-9)
        assert d["concurrence_vanishes_at"] == pytest.approx(MU_STAR, abs=1e-6)
        _, out, _ = run(capsys, "threshold", "--noise", "x")
        assert json.loads(out)["kappa_t"] == "inf"
        _, out, _ = run(capsys, "threshold", "--noise", "w")
        assert json.loads(out)["kappa_t"] == pytest.approx(0.431041, abs=1e-5)

    def test_channel_matrix(self, capsys):
        code, out, _ = run(capsys, "channel-matrix", "--noise", "yz", "--kt", "0.3")
        closed = matrix_from_json(out)
        code2, out2, err = run(capsys, "channel-matrix", "--noise", "yz", "--kt", "0.3", "--integrate", "--steps", "600")
        assert code == code2 == 0 and "integration error" in err
        assert np.max(np.abs(matrix_from_json(out2) - closed)) <= 1e-10
        assert closed[1, 2].real < 0

    def test_channel_matrix_underresolved(self, capsys):
        code, _, err = run(capsys, "channel-matrix", "--noise", "iso", "--kt", "1.0", "--integrate", "--steps", "3")
        assert code == 2

    def test_entangle(self, capsys):
        code, out, _ = run(capsys, "entangle", "--noise", "xz", "--kt", "0.2")
        d = json.loads(out)
        assert code == 0 and set(d) == {"concurrence", "eof", "groverian", "ppt_min_eig"}
        assert d["concurrence"] == pytest.approx(0.394985, abs=1e-6)

    def test_entangle_w(self, capsys):
        code, out, err = run(capsys, "entangle", "--noise", "w", "--kt", "0.1", "--seed", "3")
        d = json.loads(out)
        assert code == 0 and d["concurrence"] is None and "W channel" in err
        assert d["pmax_pure_w"] == pytest.approx(0.5, abs=1e-8)

    @pytest.mark.parametrize(
        "argv",
        [
            ("--noise", "xz", "--kt", "0.2"),
            ("--noise", "iso", "--kt", "0.3", "--method", "separable"),
            ("--noise", "iso", "--kt", "0.3", "--method", "wootters"),
        ],
    )
    def test_verify_decomposition(self, capsys, argv):
        code, out, _ = run(capsys, "verify-decomposition", *argv)
        d = json.loads(out)
        assert code == 0 and d["residual"] <= 1e-10
        assert d["mean_member_concurrence"] == pytest.approx(d["concurrence"], abs=1e-8)

    def test_verify_out_of_domain(self, capsys):
        code, _, err = run(capsys, "verify-decomposition", "--noise", "xz", "--kt", "0.6")
        assert code == 1 and "nu*" in err


class TestArgumentErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["sweep"],
            ["sweep", "--noise", "q"],
            ["fidelity", "--noise", "x", "--kt", "-1"],
            ["fidelity", "--noise", "x", "--kt", "0.1", "--grid", "4x4"],
            ["fidelity", "--noise", "x", "--kt", "0.1", "--grid", "abc"],
            ["emit-figure", "--figure", "5"],
            ["sweep", "--noise", "x", "--kt-step", "0"],
            ["frobnicate"],
        ],
    )
    def test_exit_code_one(self, capsys, argv):
        assert run(capsys, *argv)[0] == 1

    def test_unwritable_output(self, tmp_path, capsys):
        code, _, err = run(capsys, "threshold", "--noise", "iso", "--out", str(tmp_path / "missing" / "x.json"))
        assert code == 1 and "missing" in err


class TestConfigFile:
    def test_flags_override_file(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# experiment\nnoise = xz\nkt = 0.1\nmethod = wootters\n")
        assert load_config_file(cfg) == {"noise": "xz", "kt": "0.1", "method": "wootters"}
        _, out, _ = run(capsys, "verify-decomposition", "--config", str(cfg), "--kt", "0.15")
        d = json.loads(out)
        assert d["kappa_t"] == 0.15 and d["method"] == "wootters" and d["noise"] == "xz"

    def test_sweep_from_file(self, tmp_path, capsys):
        cfg = tmp_path / "sweep.cfg"
        cfg.write_text("noise=iso\nkt_max=0.1\nkt-step=0.05\nformat=json\n")
        code, out, _ = run(capsys, "sweep", "--config", str(cfg))
        assert code == 0 and len(json.loads(out)) == 3

    def test_bad_file(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("noise xz\n")
        assert run(capsys, "entangle", "--config", str(cfg), "--kt", "0.1")[0] == 1
        cfg.write_text("figure=9\n")
        assert run(capsys, "emit-figure", "--config", str(cfg))[0] == 1


class TestFigures:
    def _curve(self, path):
        rows = list(csv.reader(path.open()))
        return rows[0], [(float(a), float(b)) for a, b in rows[1:]]

    def test_figure_2(self, tmp_path):
        paths = emit_figure_data(2, tmp_path)
        assert len(paths) == 4
        header, eof = self._curve(tmp_path / "fig2_same_axis_eof.csv")
        assert header == ["kappa_t", "eof"] and eof[0] == (0.0, 1.0)
        _, g = self._curve(tmp_path / "fig2_isotropic_groverian.csv")
        first_zero = next(kt for kt, v in g if v == 0.0)
        assert abs(first_zero - MU_STAR) <= 0.01
        assert all(v == 0.0 for kt, v in g if kt >= first_zero)

    def test_figure_3(self, tmp_path):
        paths = emit_figure_data(3, tmp_path)
        assert {p.name for p in paths} == {
            f"fig3_different_axis_{q}.csv" for q in ("avg_fidelity", "concurrence", "eof", "groverian")
        }
        for q in ("concurrence", "eof", "groverian"):
            _, rows = self._curve(tmp_path / f"fig3_different_axis_{q}.csv")
            assert all(v == 0.0 for kt, v in rows if kt >= NU_STAR)
            assert all(v > 0.0 for kt, v in rows if kt < NU_STAR)

    def test_figure_4(self, tmp_path):
        emit_figure_data(4, tmp_path)
        rows = list(csv.reader((tmp_path / "fig4_thresholds.csv").open()))
        assert rows[0] == ["quantity", "kappa_t"] and len(rows) == 2
        assert float(rows[1][1]) == pytest.approx(0.431041, abs=1e-5)
        header, f = self._curve(tmp_path / "fig4_w_avg_fidelity.csv")
        assert header == ["kappa_t", "avg_fidelity"] and f[0][1] == 1.0

    def test_emit_via_cli(self, tmp_path, capsys):
        code, out, _ = run(capsys, "emit-figure", "--figure", "4", "--dir", str(tmp_path / "fig"))
        assert code == 0 and len(out.splitlines()) == 2

    def test_bad_directory(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(OSError, match="file"):
            emit_figure_data(4, blocker / "sub")
        with pytest.raises(ValueError):
            emit_figure_data(1, tmp_path)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "noisytele", "threshold", "--noise", "xz"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["kappa_t"] == pytest.approx(NU_STAR, abs=1e-9)
    proc = subprocess.run([sys.executable, "-m", "noisytele", "sweep"], capture_output=True, text=True)
    assert proc.returncode == 1
