import json

import pytest

from biphoton.cli import main


def read_rows(path):
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    return header, [l.split(",") for l in lines[1:]]


class TestArguments:
    def test_chi_out_of_range(self, capsys):
        assert main(["single-dispersion", "--chi", "1.5"]) == 2
        assert "chirality" in capsys.readouterr().err

    def test_chi_gamma_mutually_exclusive(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["single-dispersion", "--chi", "0.5", "--gamma-r", "0.3"])
        assert exc.value.code == 2

    def test_malformed_range(self, capsys):
        assert main(["single-dispersion", "--K-range", "1:2"]) == 2
        assert "lo:hi:n" in capsys.readouterr().err

    def test_missing_required_momentum(self, capsys):
        assert main(["resonance-scan", "--chi", "0.5"]) == 2

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_gamma_pair_accepted(self, tmp_path):
        out = tmp_path / "x.csv"
        rc = main(["single-dispersion", "--gamma-r", "0.3", "--gamma-l", "0.7",
                   "--K-range", "0:1:5", "--out", str(out)])
        assert rc == 0
        meta = dict(line[2:].split("=", 1) for line in out.read_text().splitlines()
                    if line.startswith("# "))
        assert float(meta["gamma_r"]) == pytest.approx(0.3)
        assert float(meta["gamma_l"]) == pytest.approx(0.7)


class TestSubcommands:
    def test_single_dispersion_holes_at_poles(self, tmp_path):
        out = tmp_path / "sd.csv"
        assert main(["single-dispersion", "--chi", "0.5", "--k0", "1.2",
                     "--K-range", "-1.2:1.2:3", "--out", str(out)]) == 0
        header, rows = read_rows(out)
        assert header == ["k", "omega"]
        assert rows[0][1] == "NaN" and rows[2][1] == "NaN"
        assert rows[1][1] != "NaN"

    def test_single_dispersion_chiral_gapless(self, tmp_path):
        out = tmp_path / "sd.csv"
        assert main(["single-dispersion", "--chi", "0", "--k0", "1.2",
                     "--K-range", "-3.1:3.1:201", "--out", str(out)]) == 0
        _, rows = read_rows(out)
        omegas = [float(r[1]) for r in rows if r[1] != "NaN"]
        # single band sweeps a huge range with no second singularity
        assert max(omegas) > 20 and min(omegas) < -20

    def test_continuum_gap_flags(self, tmp_path):
        out = tmp_path / "c.csv"
        assert main(["continuum", "--chi", "0.5", "--K-range", "1.5:1.5:1",
                     "--grid-size", "801", "--out", str(out)]) == 0
        header, rows = read_rows(out)
        unbounded = [r for r in rows if r[4] == "1" or r[5] == "1"]
        assert unbounded

    def test_bound_dispersion_default_grid(self, tmp_path):
        out = tmp_path / "b.csv"
        assert main(["bound-dispersion", "--chi", "0.5", "--K-range",
                     "1.4:1.6:3", "--out", str(out)]) == 0
        _, rows = read_rows(out)
        assert len(rows) == 3
        assert all(r[1] != "NaN" for r in rows)

    def test_bound_dispersion_chiral_closed_form(self, tmp_path):
        import math

        out = tmp_path / "c.csv"
        assert main(["bound-dispersion", "--chi", "0", "--k0", "1.2",
                     "--K-range", "0.1:1.0:4", "--out", str(out)]) == 0
        _, rows = read_rows(out)
        for r in rows:
            K, omega = float(r[0]), float(r[1])
            assert omega == pytest.approx(2.0 / math.tan(1.2 + K), abs=1e-12)

    def test_state_profile(self, tmp_path):
        out = tmp_path / "p.csv"
        assert main(["state-profile", "--chi", "0.5", "--K", "1.5",
                     "--delta-max", "10", "--out", str(out)]) == 0
        header, rows = read_rows(out)
        assert header == ["delta", "amplitude"]
        assert [r[0] for r in rows] == [str(i) for i in range(1, 11)]

    def test_roots_json(self, tmp_path):
        out = tmp_path / "r.json"
        assert main(["roots", "--chi", "0.5", "--K", "0.2", "--omega", "1.0",
                     "--format", "json", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert len(doc["rows"]) == 4
        mags = [row[4] for row in doc["rows"]]
        assert mags == sorted(mags)
        assert doc["rows"][0][6] == "ResonanceCandidate"

    def test_validate_residuals(self, tmp_path):
        out = tmp_path / "v.csv"
        assert main(["validate", "--chi", "0.5", "--K", "1.5",
                     "--lattice-n", "300", "--out", str(out)]) == 0
        _, rows = read_rows(out)
        assert float(rows[0][2]) < 1e-6

    def test_dos_masses(self, tmp_path):
        out = tmp_path / "d.csv"
        assert main(["dos", "--chi", "0.5", "--K", "0.2", "--bins", "40",
                     "--grid-size", "2001", "--out", str(out)]) == 0
        _, rows = read_rows(out)
        assert len(rows) == 40
        assert sum(float(r[2]) for r in rows) == pytest.approx(1.0, abs=1e-9)

    def test_width_vs_k(self, tmp_path):
        out = tmp_path / "w.csv"
        assert main(["width-vs-K", "--chi", "0.5", "--K-range", "0.04:0.08:2",
                     "--points", "801", "--out", str(out)]) == 0
        _, rows = read_rows(out)
        assert all(r[3] == "Sharp" for r in rows)
        assert float(rows[0][2]) < float(rows[1][2])


class TestExitCodes:
    def test_numerical_failure_is_4(self, tmp_path):
        # resonance scan strictly inside the gap window has no candidates
        rc = main(["resonance-scan", "--chi", "0.5", "--K", "1.5",
                   "--omega-range", "-1.0:0.2:64", "--out", str(tmp_path / "x.csv")])
        assert rc == 4

    def test_io_failure_is_3(self, tmp_path):
        rc = main(["single-dispersion", "--K-range", "0:1:3",
                   "--out", str(tmp_path / "no" / "dir" / "x.csv")])
        assert rc == 3

    def test_strict_escalates_pole_holes(self, tmp_path):
        argv = ["single-dispersion", "--chi", "0.5", "--k0", "1.2",
                "--K-range", "-1.2:1.2:3", "--out", str(tmp_path / "x.csv")]
        assert main(argv) == 0
        assert main(argv + ["--strict"]) == 4


class TestDeterminism:
    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["resonance-scan", "--chi", "0.5", "--K", "0.2",
                "--points", "101", "--omega-range", "0.5:1.2:101"]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestConfigFile:
    def test_file_supplies_defaults(self, tmp_path):
        cfg = tmp_path / "r.cfg"
        cfg.write_text("chi=0.25\nk0=1.1\nK-range=0:1:5\n")
        out = tmp_path / "o.csv"
        assert main(["single-dispersion", "--config", str(cfg), "--out", str(out)]) == 0
        text = out.read_text()
        assert "# chi=0.25" in text and "# k0=1.1" in text

    def test_flags_override_file(self, tmp_path):
        cfg = tmp_path / "r.cfg"
        cfg.write_text("chi=0.25\nK-range=0:1:5\n")
        out = tmp_path / "o.csv"
        assert main(["single-dispersion", "--config", str(cfg),
                     "--chi", "0.75", "--out", str(out)]) == 0
        assert "# chi=0.75" in out.read_text()

    def test_run_dispatches_subcommand(self, tmp_path):
        cfg = tmp_path / "r.cfg"
        cfg.write_text("subcommand=roots\nchi=0.5\nK=0.2\nomega=1.0\n")
        out = tmp_path / "o.csv"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
        assert "# subcommand=roots" in out.read_text()

    def test_run_requires_subcommand_key(self, tmp_path, capsys):
        cfg = tmp_path / "r.cfg"
        cfg.write_text("chi=0.5\n")
        assert main(["run", "--config", str(cfg)]) == 2
        assert "subcommand" in capsys.readouterr().err

    def test_malformed_line_rejected(self, tmp_path):
        cfg = tmp_path / "r.cfg"
        cfg.write_text("chi 0.5\n")
        assert main(["single-dispersion", "--config", str(cfg)]) == 2


class TestPlot:
    def test_figure_rendered_alongside_csv(self, tmp_path):
        out, png = tmp_path / "rs.csv", tmp_path / "rs.png"
        assert main(["resonance-scan", "--chi", "0.5", "--K", "0.2",
                     "--points", "101", "--omega-range", "0.5:1.2:101",
                     "--out", str(out), "--plot", str(png)]) == 0
        assert out.exists()
        assert png.stat().st_size > 1000

    def test_bound_dispersion_plot(self, tmp_path):
        png = tmp_path / "b.png"
        assert main(["bound-dispersion", "--chi", "0.5", "--K-range", "1.4:1.6:3",
                     "--out", str(tmp_path / "b.csv"), "--plot", str(png)]) == 0
        assert png.exists()
