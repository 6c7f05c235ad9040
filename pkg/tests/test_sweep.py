import csv
import json
import math
import textwrap
from dataclasses import replace

import numpy as np
import pytest

from qd_laser.cli import EXIT_OK, EXIT_PARTIAL, EXIT_SPEC_ERROR, main
from qd_laser.errors import ScenarioError
from qd_laser.generators import ModelConfig
from qd_laser.phonon import BathParams
from qd_laser.sweep import SweepSpec, axis_fields, compare_engines, emit, load_scenario, run_sweep
from qd_laser.sweep.emit import format_value
from qd_laser.utils import COMPARE_COLUMNS, RESULT_COLUMNS

SCENARIO = """
[model]
n_max = 4
eta1 = 0.3
eta2 = 0.3

[bath]
alpha_p = 0

[sweep]
axis = eta
values = 0.2, 0.4
engine = both

[output]
outputs = populations, mean_n, excess
"""


def write_scenario(tmp_path, body=SCENARIO, name="scenario.ini"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(body), encoding="utf-8")
    return str(path)


@pytest.fixture
def spec(tmp_path):
    return load_scenario(write_scenario(tmp_path))


def test_load_scenario(spec):
    assert spec.axis == "eta"
    assert spec.grid == (0.2, 0.4)
    assert spec.engines == ("full", "sme")
    assert spec.outputs == ("populations", "mean_n", "excess")
    assert spec.base.n_max == 4 and spec.base.bath.alpha_p == 0.0
    assert spec.negative_rate_tol is None
    assert spec.output_format == "csv"


def test_load_scenario_linear_grid(tmp_path):
    body = SCENARIO.replace("values = 0.2, 0.4", "start = 0.0\nstop = 1.0\nnum = 5")
    spec = load_scenario(write_scenario(tmp_path, body))
    assert spec.grid == (0.0, 0.25, 0.5, 0.75, 1.0)


@pytest.mark.parametrize("old, new", [
    ("[output]", "[plot]"),
    ("n_max = 4", "n_max = 4\nwidth = 2"),
    ("values = 0.2, 0.4", "values = 0.2, 0.4\nnum = 3"),
    ("values = 0.2, 0.4", "start = 0.0"),
    ("values = 0.2, 0.4", "values = 0.4, 0.2, 0.3"),
    ("n_max = 4", "n_max = four"),
    ("axis = eta", "axis = n_max"),
    ("engine = both", "engine = exact"),
    ("outputs = populations, mean_n, excess", "outputs = spectra"),
    ("engine = both", "engine = both\ntrack_resonance = yes"),
    ("alpha_p = 0", "alpha_p = -1"),
])
def test_load_scenario_rejects_bad_files(tmp_path, old, new):
    with pytest.raises(ScenarioError):
        load_scenario(write_scenario(tmp_path, SCENARIO.replace(old, new)))


def test_load_scenario_needs_a_sweep(tmp_path):
    body = SCENARIO.split("[sweep]")[0]
    with pytest.raises(ScenarioError):
        load_scenario(write_scenario(tmp_path, body))
    with pytest.raises(FileNotFoundError):
        load_scenario(str(tmp_path / "missing.ini"))


def test_axis_fields():
    assert axis_fields("eta", "incoherent") == ("eta1", "eta2")
    assert axis_fields("delta", "incoherent") == ("delta1", "delta2")
    assert axis_fields("delta", "coherent") == ("delta1p", "delta2p")
    assert axis_fields("kappa", "incoherent") == ("kappa",)
    assert axis_fields("temperature", "incoherent") == ("temperature",)
    for axis in ("n_max", "pump_mode", "omega"):
        with pytest.raises(ValueError):
            axis_fields(axis, "incoherent")


def test_point_config_sets_axis_fields(spec):
    config = spec.point_config(0.4)
    assert config.eta1 == 0.4 and config.eta2 == 0.4
    warm = replace(spec, axis="temperature", grid=(5.0, 10.0)).point_config(10.0)
    assert warm.bath.temperature == 10.0
    assert warm.eta1 == 0.3


def test_point_config_tracks_dressed_resonance():
    base = ModelConfig(pump_mode="coherent", n_max=4, delta1p=-1.5, delta2p=-1.5)
    spec = SweepSpec(base=base, axis="eta", grid=(0.4, 0.8), track_resonance=True)
    config = spec.point_config(0.8)
    assert config.eta1 == 0.8
    assert config.delta_cp == pytest.approx(-np.sqrt(1.5 ** 2 + 4 * 0.8 ** 2))
    with pytest.raises(ValueError):
        SweepSpec(base=ModelConfig(n_max=4), axis="eta", grid=(0.4,), track_resonance=True)


def test_format_value():
    assert format_value(True) == "true"
    assert format_value(None) == ""
    assert format_value(3) == "3"
    assert format_value(0.1 + 0.2) == "0.3"
    assert format_value(1.0 / 3.0) == "0.333333333333"


def test_emit_csv_and_json(tmp_path):
    records = [
        dict(axis=0.1, engine="sme", mean_n=1.0 / 3.0, spee=float("nan"), n_max=4, flags="a;b"),
        dict(axis=0.2, engine="full", mean_n=2.0, n_max=4, flags=""),
    ]
    csv_path = emit(records, str(tmp_path / "out" / "rows.csv"))
    with open(csv_path, encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == RESULT_COLUMNS
    first = dict(zip(rows[0], rows[1]))
    assert first["mean_n"] == "0.333333333333"
    assert first["spee"] == "nan"
    assert first["p_ee"] == ""
    assert first["flags"] == "a;b"

    json_path = emit(records, str(tmp_path / "rows.json"), fmt="json")
    with open(json_path, encoding="utf-8") as f:
        payload = json.load(f)
    assert list(payload[0]) == list(RESULT_COLUMNS)
    assert payload[0]["spee"] is None
    assert payload[0]["mean_n"] == 0.333333333333
    assert payload[1]["n_max"] == 4

    with pytest.raises(ValueError):
        emit(records, str(tmp_path / "rows.txt"), fmt="txt")


def test_emit_without_records_writes_header(tmp_path):
    path = emit([], str(tmp_path / "empty.csv"))
    with open(path, encoding="utf-8") as f:
        assert f.read() == ",".join(RESULT_COLUMNS) + "\n"


def test_run_sweep_without_phonons(spec):
    rows = run_sweep(spec, workers=2, progress=False)
    assert [(row.index, row.engine) for row in rows] == [(0, "full"), (0, "sme"), (1, "full"), (1, "sme")]
    for row in rows:
        assert not row.failed
        assert row.B == 1.0 and row.n_max == 4
        assert row.flags[0] == "g1_abs=100"
        assert sum(row.populations.values()) == pytest.approx(1.0, abs=1e-10)
        assert set(row.as_record()) == set(RESULT_COLUMNS)
    full, sme = rows[2], rows[3]
    for label, value in full.populations.items():
        assert value == pytest.approx(sme.populations[label], abs=1e-10)
    assert full.excess == {}
    assert math.isnan(full.as_record()["spee"])
    assert sorted(sme.excess) == [1, 2, 3, 4]
    assert sme.mean_n_rate_eq == pytest.approx(sme.mean_n, abs=1e-8)
    assert sme.overflow_excess == 0.0
    assert math.isnan(full.overflow_excess)
    assert any(flag.startswith("negative_share=") for flag in sme.flags)
    assert rows[2].mean_n > rows[0].mean_n


def test_run_sweep_is_deterministic(spec, tmp_path):
    paths = []
    for workers in (1, 3):
        rows = run_sweep(spec, workers=workers, progress=False)
        paths.append(emit([row.as_record() for row in rows], str(tmp_path / f"rows{workers}.csv")))
    with open(paths[0], encoding="utf-8") as a, open(paths[1], encoding="utf-8") as b:
        assert a.read() == b.read()


def test_run_sweep_without_outputs(spec):
    assert run_sweep(replace(spec, outputs=()), progress=False) == []


def test_failed_points_are_recorded(spec):
    strict = replace(spec, engine="sme", negative_rate_tol=0.0)
    rows = run_sweep(strict, workers=1, progress=False)
    assert len(rows) == 2
    for row in rows:
        assert row.failed
        assert "error=NegativeRateError" in row.flags
        assert math.isnan(row.mean_n)


def test_compare_engines_without_phonons(spec):
    records, summary = compare_engines(replace(spec, engine="sme"), workers=2)
    assert len(records) == 2
    for record in records:
        assert set(record) == set(COMPARE_COLUMNS)
        assert record["rel_rate_eq"] < 1e-6
        assert record["overflow_excess"] == 0.0
    assert summary["max_population_difference"] < 1e-10
    assert summary["max_mean_n_difference"] < 1e-10


def test_cli_sweep_writes_rows(tmp_path):
    config = write_scenario(tmp_path)
    out = tmp_path / "results" / "rows.csv"
    assert main(["sweep", "--config", config, "--out", str(out), "--workers", "1"]) == EXIT_OK
    with open(out, encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert len(rows) == 1 + 4
    assert main(["sweep", "--config", config, "--out", str(out), "--engine", "full", "--format", "json"]) == EXIT_OK
    with open(tmp_path / "results" / "rows.json", encoding="utf-8") as f:
        assert {row["engine"] for row in json.load(f)} == {"full"}


def test_cli_exit_codes(tmp_path):
    bad = write_scenario(tmp_path, SCENARIO.replace("[output]", "[plot]"), name="bad.ini")
    assert main(["sweep", "--config", bad, "--out", str(tmp_path / "bad.csv")]) == EXIT_SPEC_ERROR
    assert main(["sweep", "--config", str(tmp_path / "missing.ini")]) == EXIT_SPEC_ERROR
    strict = write_scenario(tmp_path, SCENARIO + "negative_rate_tol = 0\n", name="strict.ini")
    out = tmp_path / "strict.csv"
    assert main(["sweep", "--config", strict, "--out", str(out), "--engine", "sme"]) == EXIT_PARTIAL
    with open(out, encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert all("error=NegativeRateError" in row["flags"] for row in rows)


def test_cli_compare_and_check(tmp_path):
    config = write_scenario(tmp_path)
    out = tmp_path / "cmp.csv"
    assert main(["compare", "--config", config, "--out", str(out), "--workers", "2"]) == EXIT_OK
    with open(tmp_path / "cmp.compare.csv", encoding="utf-8") as f:
        assert tuple(next(csv.reader(f))) == COMPARE_COLUMNS
    assert main(["check", "--config", config]) == EXIT_OK


def test_cli_calibrate(capsys):
    assert main(["calibrate", "--temperature", "5", "--target", "0.9"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("g1_abs = ")
    assert "<B>(5 K) = 0.900000" in out


def test_sweep_spec_validation():
    base = ModelConfig(n_max=4, bath=BathParams(alpha_p=0.0))
    with pytest.raises(ValueError):
        SweepSpec(base=base, axis="eta", grid=())
    with pytest.raises(ValueError):
        SweepSpec(base=base, axis="eta", grid=(0.1,), m_max=5)
    with pytest.raises(ValueError):
        SweepSpec(base=base, axis="eta", grid=(0.1,), negative_rate_tol=-1.0)
    with pytest.raises(ValueError):
        SweepSpec(base=base, axis="eta", grid=(0.1,), output_format="xml")
