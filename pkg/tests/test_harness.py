import json
import subprocess
import sys

import numpy as np
import pytest

from oiasim import analytic, cli, harness
from oiasim.channel import ChannelRealization, SystemConfig, sum_rate
from oiasim.harness import ExperimentSpec, SchemeVariant
from oiasim.metrics import max_sinr_receiver
from oiasim.selection import (select_coia_full, select_max_sinr, select_max_snr,
                              select_oia)


def small_spec(**kw):
    base = dict(schemes=(SchemeVariant("oia"),), k=3, snr_db=(0.0, 10.0),
                trials=40, seed=5)
    base.update(kw)
    return ExperimentSpec(**base)


class TestSchemeVariant:
    def test_labels(self):
        assert SchemeVariant("max-snr").label == "max-snr"
        assert SchemeVariant("coia", s=4, metric="alpha").label == "coia-s4-alpha"
        assert SchemeVariant("coia", s=4, metric="alpha", target_load=0.25).label \
            == "coia-s4-alpha-tfb0.25"
        assert SchemeVariant("oia", target_load=0.5).label == "oia-tfb0.5"

    def test_validation(self):
        with pytest.raises(ValueError):
            SchemeVariant("bogus")
        with pytest.raises(ValueError):
            SchemeVariant("oia", s=2)
        with pytest.raises(ValueError):
            SchemeVariant("max-sinr", target_load=0.5)
        with pytest.raises(ValueError):
            SchemeVariant("coia", metric="delta")


class TestRun:
    def test_row_grid(self):
        spec = small_spec(schemes=(SchemeVariant("oia"), SchemeVariant("max-snr")))
        rows = harness.run(spec)
        assert len(rows) == 2 * 2
        assert [r.scheme for r in rows] == ["oia", "oia", "max-snr", "max-snr"]
        assert all(r.seed == 5 and r.trials == 40 for r in rows)
        assert all(r.sum_rate_se >= 0.0 for r in rows)

    def test_deterministic(self):
        a = harness.run(small_spec())
        b = harness.run(small_spec())
        assert a == b

    def test_common_random_numbers_across_scheme_sets(self):
        solo = harness.run(small_spec(schemes=(SchemeVariant("oia"),)))
        both = harness.run(small_spec(schemes=(SchemeVariant("max-snr"), SchemeVariant("oia"))))
        assert solo == [r for r in both if r.scheme == "oia"]

    def test_singleton_cell(self):
        spec = small_spec(schemes=(SchemeVariant("max-sinr"), SchemeVariant("max-snr"),
                                   SchemeVariant("oia"), SchemeVariant("coia")),
                          k=1, trials=3, snr_db=(5.0,))
        rows = harness.run(spec)
        # one UE per cell: every scheme serves it, all report full feedback
        assert all(r.feedback_load == 1.0 for r in rows)
        oia_row = next(r for r in rows if r.scheme == "oia")
        coia_row = next(r for r in rows if r.scheme == "coia-s1-gamma")
        assert oia_row.sum_rate_mean != coia_row.sum_rate_mean  # different vectors only

    def test_se_shrinks_like_sqrt_trials(self):
        small = harness.run(small_spec(trials=400, snr_db=(10.0,)))[0]
        large = harness.run(small_spec(trials=6400, snr_db=(10.0,)))[0]
        ratio = small.sum_rate_se / large.sum_rate_se
        assert 2.8 < ratio < 5.7  # ideal 4.0

    def test_validation(self):
        with pytest.raises(ValueError):
            small_spec(trials=0)
        with pytest.raises(ValueError):
            small_spec(snr_db=())
        with pytest.raises(ValueError):
            small_spec(schemes=())


class TestBatchMatchesSingleRealizationPath:
    def test_all_schemes(self):
        spec = small_spec(
            schemes=(SchemeVariant("oia"), SchemeVariant("max-snr"),
                     SchemeVariant("max-sinr"), SchemeVariant("coia", s=3),
                     SchemeVariant("coia", s=3, metric="alpha")),
            k=4, snr_db=(5.0,), trials=6, seed=11)
        rows = harness.run(spec)
        h, w_slot, cb = harness.draw_experiment(spec)
        noise_var = 10.0 ** (-0.5)
        cfg = SystemConfig(k=4, s=3, p_s=1.0, p_i=1.0, noise_var=noise_var)

        def max_sinr_rate(real, w, ue):
            lams = [max_sinr_receiver(cfg, real, i, int(ue[i]), w)[1] for i in range(3)]
            return sum_rate(lams)

        ref_rates = {label: [] for label in
                     ("oia", "max-snr", "max-sinr", "coia-s3-gamma", "coia-s3-alpha")}
        for t in range(spec.trials):
            real = ChannelRealization(h[t])
            out = select_oia(cfg, real, w_slot[t])
            ref_rates["oia"].append(sum_rate(out.sinr))
            out = select_max_snr(cfg, real, w_slot[t])
            ref_rates["max-snr"].append(max_sinr_rate(real, w_slot[t], out.ue))
            out = select_max_sinr(cfg, real, w_slot[t])
            ref_rates["max-sinr"].append(sum_rate(out.sinr))
            out = select_coia_full(cfg, real, cb, kind="gamma")
            ref_rates["coia-s3-gamma"].append(sum_rate(out.sinr))
            out = select_coia_full(cfg, real, cb, kind="alpha")
            ref_rates["coia-s3-alpha"].append(sum_rate(out.sinr))

        for row in rows:
            assert row.sum_rate_mean == pytest.approx(np.mean(ref_rates[row.scheme]), rel=1e-9)


class TestCsv:
    def test_byte_identical_output(self):
        spec = small_spec()
        a = harness.csv_text(harness.run(spec), harness.spec_header(spec))
        b = harness.csv_text(harness.run(spec), harness.spec_header(spec))
        assert a == b

    def test_layout(self):
        spec = small_spec()
        text = harness.csv_text(harness.run(spec), harness.spec_header(spec))
        lines = text.strip().split("\n")
        comments = [l for l in lines if l.startswith("#")]
        assert any("seed=5" in c for c in comments)
        header = next(l for l in lines if not l.startswith("#"))
        assert header == ",".join(harness.CSV_COLUMNS)
        data = [l for l in lines if not l.startswith("#")][1:]
        assert len(data) == 2
        assert all(len(l.split(",")) == len(harness.CSV_COLUMNS) for l in data)

    def test_write_to_path(self, tmp_path):
        spec = small_spec()
        out = tmp_path / "r.csv"
        harness.write_csv(out, harness.run(spec), harness.spec_header(spec))
        assert out.read_text() == harness.csv_text(harness.run(spec), harness.spec_header(spec))


class TestTable1AndFigures:
    def test_table1_grid(self):
        grid = harness.table1((10, 20), (1, 2))
        assert [(k, s) for k, s, _ in grid] == [(10, 1), (10, 2), (20, 1), (20, 2)]
        vals = {(k, s): v for k, s, v in grid}
        assert vals[(10, 1)] == pytest.approx(10 / 11, abs=1e-9)

    def test_figure1_analytic_rows_share_table1_path(self):
        rows, _ = harness.figure(1, trials=2, snr_db=(0.0,), seed=3)
        analytic_rows = [r for r in rows if r.scheme == "analytic-expectation"]
        assert {(r.k, r.s) for r in analytic_rows} == {(k, s) for k in (10, 20) for s in (1, 2, 4)}
        ref = {(k, s): v for k, s, v in harness.table1((10, 20), (1, 2, 4))}
        for r in analytic_rows:
            assert r.selected_metric_mean == ref[(r.k, r.s)]
            assert r.snr_db is None and r.sum_rate_mean is None

    def test_figure2_threshold_loads(self):
        rows, _ = harness.figure(2, trials=1500, snr_db=(10.0,), seed=4)
        assert len(rows) == 8
        by_scheme = {r.scheme: r for r in rows}
        assert by_scheme["oia"].feedback_load == 1.0
        for load in (0.5, 0.25, 0.125):
            assert by_scheme[f"oia-tfb{load:g}"].feedback_load == pytest.approx(load, abs=0.02)
            assert by_scheme[f"max-snr-tfb{load:g}"].feedback_load == pytest.approx(load, abs=0.02)

    def test_figure3_variants(self):
        rows, _ = harness.figure(3, trials=2, snr_db=(0.0, 20.0), seed=4)
        schemes = [r.scheme for r in rows]
        assert len(rows) == 5 * 2
        for label in ("max-snr", "oia", "coia-s4-gamma", "coia-s4-alpha",
                      "coia-s4-alpha-tfb0.25"):
            assert schemes.count(label) == 2

    def test_unknown_figure(self):
        with pytest.raises(ValueError):
            harness.figure(9)


class TestCli:
    def test_simulate_csv(self, tmp_path, capsys):
        out = tmp_path / "sim.csv"
        rc = cli.main(["simulate", "--schemes", "oia,max-snr", "--k", "3",
                       "--snr-db", "0,10", "--trials", "25", "--seed", "9",
                       "--out", str(out)])
        assert rc == 0
        text = out.read_text()
        assert text.splitlines()[-1].count(",") == len(harness.CSV_COLUMNS) - 1
        data_rows = [l for l in text.splitlines() if l and not l.startswith("#")]
        assert len(data_rows) == 1 + 4

    def test_simulate_repeat_identical(self, tmp_path):
        args = ["simulate", "--schemes", "coia", "--k", "2", "--s", "2",
                "--snr-db", "5", "--trials", "30", "--seed", "2"]
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        cli.main(args + ["--out", str(a)])
        cli.main(args + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_config_file_with_flag_override(self, tmp_path):
        config = {"schemes": "oia", "k": 3, "snr_db": [0.0], "trials": 20,
                  "seed": 7, "feedback": "threshold:0.5"}
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(config))
        out1 = tmp_path / "o1.csv"
        cli.main(["simulate", "--config", str(cfg_path), "--out", str(out1)])
        assert "oia-tfb0.5" in out1.read_text()
        # flags win: override the seed and feedback
        out2 = tmp_path / "o2.csv"
        cli.main(["simulate", "--config", str(cfg_path), "--feedback", "full",
                  "--out", str(out2)])
        text = out2.read_text()
        assert "oia-tfb" not in text and "seed=7" in text

    def test_unknown_config_field(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"mystery": 1}))
        with pytest.raises(SystemExit):
            cli.main(["simulate", "--config", str(cfg_path)])

    def test_analytic_expectation(self, capsys):
        rc = cli.main(["analytic", "expectation", "--k", "10", "--s", "1"])
        assert rc == 0
        assert float(capsys.readouterr().out) == pytest.approx(10 / 11, abs=1e-9)

    def test_analytic_threshold(self, capsys):
        rc = cli.main(["analytic", "threshold", "--scheme", "maxsnr", "--load", "0.25"])
        assert rc == 0
        assert float(capsys.readouterr().out) == pytest.approx(2.6925, abs=5e-4)

    def test_analytic_threshold_coia_needs_theta(self, capsys):
        with pytest.raises(ValueError):
            cli.main(["analytic", "threshold", "--scheme", "coia", "--load", "0.25"])
        rc = cli.main(["analytic", "threshold", "--scheme", "coia", "--load", "0.25",
                       "--theta", "2"])
        assert rc == 0
        t = float(capsys.readouterr().out)
        assert analytic.load_curve("coia", t, 2.0) == pytest.approx(0.25, abs=1e-9)

    def test_table1_output(self, capsys):
        rc = cli.main(["table1", "--ks", "10", "--ss", "1,2"])
        assert rc == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "k,s,expected_selected_metric"
        assert len(lines) == 3

    def test_figure_cli(self, tmp_path):
        out = tmp_path / "fig3.csv"
        rc = cli.main(["figure", "--id", "3", "--trials", "2", "--snr-db", "0",
                       "--seed", "1", "--out", str(out)])
        assert rc == 0
        assert len([l for l in out.read_text().splitlines() if not l.startswith("#")]) == 1 + 5

    def test_console_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "oiasim.cli", "analytic",
                               "expectation", "--k", "10", "--s", "1"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert float(proc.stdout) == pytest.approx(10 / 11, abs=1e-9)
