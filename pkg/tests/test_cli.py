"""Tests for the batch front end: exit codes, artifact schema, byte
determinism, 17-digit round-trips, and plot-data routing."""

import json

import pytest

from heunspectra.cli import CSV_HEADER, main

M = 0.5


def _write_config(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


SPECTRUM_DOC = {
    "physical": {"M": M, "a": 0.0, "s": -1, "l": [1], "m": [0]},
    "kind": "qnm",
    "solver": {"n_max": 1, "seed_grid": [[0.5, 0.2], [0.43, 0.59]]},
}


@pytest.fixture(scope="module")
def spectrum_run(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("spectrum")
    cfg = _write_config(tmp / "config.json", SPECTRUM_DOC)
    out = tmp / "out"
    status = main(["spectrum", "--config", cfg, "--out", str(out)])
    assert status == 0
    return tmp, out


class TestEvalMode:
    def test_value_at_origin(self, tmp_path, capsys):
        cfg = _write_config(tmp_path / "c.json", {
            "eval": {
                "convention": "canonical",
                "params": {"gamma0": 1.5, "delta0": 0.5, "epsilon0": 0.2,
                           "alpha0": 1.0, "beta0": 2.0, "q0": 0.3},
                "z": 0.0,
            },
        })
        status = main(["eval", "--config", cfg, "--out", str(tmp_path)])
        assert status == 0
        printed = capsys.readouterr().out
        assert "= 1+0j" in printed
        doc = json.loads((tmp_path / "eval.json").read_text())
        assert doc["value"] == [1.0, 0.0]
        assert doc["derivative"][0] == pytest.approx(0.2)


class TestSpectrumMode:
    def test_schema_and_values(self, spectrum_run):
        _, out = spectrum_run
        lines = (out / "spectrum.csv").read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 3  # header + n_max+1 rows
        row0 = lines[1].split(",")
        assert row0[:5] == ["1", "0", "0", "0", "qnm"]
        assert abs(float(row0[7]) - 2.0) < 1e-8  # re_E = l(l+1)
        assert row0[10] == "true"

    def test_byte_determinism(self, spectrum_run, tmp_path):
        tmp, out = spectrum_run
        rerun = tmp_path / "rerun"
        status = main(["spectrum", "--config", str(tmp / "config.json"),
                       "--out", str(rerun)])
        assert status == 0
        assert (rerun / "spectrum.csv").read_bytes() == \
            (out / "spectrum.csv").read_bytes()

    def test_round_trip_seventeen_digits(self, spectrum_run):
        _, out = spectrum_run
        doc = json.loads((out / "spectrum.json").read_text())
        lines = (out / "spectrum.csv").read_text().splitlines()[1:]
        for row, line in zip(doc["rows"], lines):
            cells = line.split(",")
            assert float(cells[5]) == row["re_omega"]
            assert float(cells[6]) == row["im_omega"]
            assert float(cells[7]) == row["re_E"]
            assert float(cells[8]) == row["im_E"]

    def test_worker_pool(self, tmp_path):
        doc = dict(SPECTRUM_DOC)
        doc["physical"] = dict(doc["physical"], m=[0, 1])
        doc["solver"] = {"n_max": 0, "seed_grid": [[0.5, 0.2]]}
        cfg = _write_config(tmp_path / "c.json", doc)
        status = main(["spectrum", "--config", cfg,
                       "--out", str(tmp_path / "out"), "--jobs", "2"])
        assert status == 0
        lines = (tmp_path / "out" / "spectrum.csv").read_text().splitlines()
        assert len(lines) == 3  # m=0 and m=1 rows
        # m decouples at a=0
        assert lines[1].split(",")[5] == lines[2].split(",")[5]


class TestContinueMode:
    def test_degenerate_range_matches_spectrum(self, spectrum_run, tmp_path):
        doc = dict(SPECTRUM_DOC)
        doc["solver"] = {"n_max": 0, "seed_grid": [[0.5, 0.2]]}
        doc["continue"] = {"a_min": 0.0, "a_max": 0.0}
        cfg = _write_config(tmp_path / "c.json", doc)
        status = main(["continue", "--config", cfg, "--out", str(tmp_path)])
        assert status == 0
        lines = (tmp_path / "continuation.csv").read_text().splitlines()
        _, out = spectrum_run
        spec_lines = (out / "spectrum.csv").read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert lines[1] == spec_lines[1]

    def test_short_track(self, tmp_path):
        doc = dict(SPECTRUM_DOC)
        doc["solver"] = {"n_max": 0, "seed_grid": [[0.5, 0.2]]}
        doc["continue"] = {"a_min": 0.0, "a_max": 0.1, "da0": 0.05}
        cfg = _write_config(tmp_path / "c.json", doc)
        status = main(["continue", "--config", cfg, "--out", str(tmp_path)])
        assert status == 0
        lines = (tmp_path / "continuation.csv").read_text().splitlines()
        a_vals = [float(ln.split(",")[3]) for ln in lines[1:]]
        assert a_vals[0] == 0.0
        assert a_vals[-1] == pytest.approx(0.1)
        track = (tmp_path / "plot_l1_m0_qnm_stable.csv").read_text()
        assert track.splitlines()[0] == "a,re_omega,im_omega"


class TestEmitPlotMode:
    def test_round_trip_and_routing(self, spectrum_run, tmp_path):
        _, out = spectrum_run
        doc = json.loads((out / "spectrum.json").read_text())
        # flag the overtone as spurious to exercise series routing
        doc["rows"][1]["stable"] = False
        src = tmp_path / "rows.json"
        src.write_text(json.dumps(doc))
        cfg = _write_config(tmp_path / "c.json", {
            "plot": {"style": "complex-plane", "input": str(src)}})
        status = main(["emit-plot", "--config", cfg, "--out", str(tmp_path)])
        assert status == 0
        stable = (tmp_path / "plot_l1_m0_qnm_stable.csv").read_text()
        spurious = (tmp_path / "plot_l1_m0_qnm_spurious.csv").read_text()
        s_rows = stable.splitlines()[1:]
        p_rows = spurious.splitlines()[1:]
        assert len(s_rows) == 1
        assert len(p_rows) == 1
        re_om, im_om = (float(v) for v in s_rows[0].split(","))
        assert re_om == doc["rows"][0]["re_omega"]
        assert im_om == doc["rows"][0]["im_omega"]

    def test_empty_input_fails(self, tmp_path):
        src = tmp_path / "rows.json"
        src.write_text(json.dumps({"rows": []}))
        cfg = _write_config(tmp_path / "c.json", {
            "plot": {"style": "complex-plane", "input": str(src)}})
        status = main(["emit-plot", "--config", cfg, "--out", str(tmp_path)])
        assert status == 1


class TestExitCodes:
    def test_missing_config_file(self):
        assert main(["spectrum", "--config", "/no/such/file.json"]) == 2

    def test_invalid_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["spectrum", "--config", str(bad)]) == 2

    def test_bad_physical_block(self, tmp_path):
        cfg = _write_config(tmp_path / "c.json", {
            "physical": {"M": M, "a": 0.7, "s": -1, "l": [1], "m": [0]}})
        assert main(["spectrum", "--config", cfg]) == 2

    def test_compute_failure(self, tmp_path):
        doc = dict(SPECTRUM_DOC)
        doc["solver"] = {"n_max": 1, "seed_grid": []}
        cfg = _write_config(tmp_path / "c.json", doc)
        assert main(["spectrum", "--config", cfg,
                     "--out", str(tmp_path)]) == 1

    def test_bad_jobs(self, tmp_path):
        cfg = _write_config(tmp_path / "c.json", SPECTRUM_DOC)
        assert main(["spectrum", "--config", cfg, "--jobs", "0"]) == 2
