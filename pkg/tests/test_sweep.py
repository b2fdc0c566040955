import math
import time
from dataclasses import replace

import pytest

from qfp_sim.errors import ConfigError, SweepPointError
from qfp_sim.presets import get_preset
from qfp_sim.sequential import SequentialParams
from qfp_sim.single import SingleQubitParams
from qfp_sim.sweep import SweepTask, default_workers, emit, read_csv, read_json, run_sweep


def _task(model, fig):
    p = get_preset(model, fig)
    return SweepTask(model, p.params, p.bases, p.axis, p.grid)


def test_worker_count_does_not_change_csv(tmp_path):
    task = _task("single", "3a")
    emit(run_sweep(task, 1), "csv", tmp_path / "one.csv")
    emit(run_sweep(task, 8), "csv", tmp_path / "eight.csv")
    assert (tmp_path / "one.csv").read_bytes() == (tmp_path / "eight.csv").read_bytes()


def test_empty_basis_set():
    with pytest.raises(ConfigError):
        run_sweep(SweepTask("single", SingleQubitParams(), (), "chi_t", (0.1,)))


@pytest.mark.parametrize("grid", [(), (0.2, 0.1), (0.1, 0.1)])
def test_bad_grid(grid):
    with pytest.raises(ConfigError):
        run_sweep(SweepTask("single", SingleQubitParams(), ("flux",), "chi_t", grid))


def test_unknown_model():
    with pytest.raises(ConfigError):
        run_sweep(SweepTask("triple", SingleQubitParams(), ("flux",), "chi_t", (0.1,)))


def test_point_failure_carries_record():
    with pytest.raises(SweepPointError) as info:
        run_sweep(SweepTask("single", SingleQubitParams(), ("flux",), "bogus_axis", (0.1,)))
    assert info.value.record["axis"] == "bogus_axis"


def test_csv_shape(tmp_path):
    r = run_sweep(SweepTask("single", SingleQubitParams(n_max=10), ("flux", "energy"), "chi_t", (0.0, 0.5, 1.0)))
    emit(r, "csv", tmp_path / "s.csv")
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert len(lines) == 4
    assert lines[0] == "axis,flux,energy"


def test_round_trips(tmp_path):
    r = run_sweep(_task("sequential", "5a"), 4)
    emit(r, "json", tmp_path / "r.json")
    back = read_json(tmp_path / "r.json")
    assert back.to_dict() == r.to_dict()
    emit(r, "csv", tmp_path / "r.csv")
    csv_back = read_csv(tmp_path / "r.csv", r.axis_name)
    assert csv_back.axis_values == r.axis_values
    assert csv_back.series == r.series


def test_truncation_warning_in_metadata():
    p = SequentialParams(n_max=21, alpha=3.0)
    r = run_sweep(SweepTask("sequential", p, ("flux",), "chi_t", (0.5,)))
    assert any(w.startswith("truncation") for w in r.metadata["warnings"])
    quiet = run_sweep(SweepTask("sequential", replace(p, alpha=1.0), ("flux",), "chi_t", (0.5,)))
    assert not any(w.startswith("truncation") for w in quiet.metadata["warnings"])


def test_metadata_records_parameters():
    r = run_sweep(_task("anneal", "2a"))
    assert r.metadata["params"]["beta_max"] == 1.5
    assert r.metadata["model"] == "anneal"
    assert "code_version" in r.metadata


def test_fig6c_budget():
    p = get_preset("sequential", "6c")
    grid = tuple(x * 0.1 / 59 for x in range(60))
    start = time.perf_counter()
    r = run_sweep(SweepTask("sequential", p.params, p.bases, p.axis, grid), 8)
    assert time.perf_counter() - start < 120
    assert len(r.axis_values) == 60
    r.check_range()


def test_workers_from_environment(monkeypatch):
    monkeypatch.setenv("QFP_SIM_WORKERS", "3")
    assert default_workers() == 3
    monkeypatch.setenv("QFP_SIM_WORKERS", "zero")
    with pytest.raises(ConfigError):
        default_workers()
    monkeypatch.setenv("QFP_SIM_WORKERS", "0")
    with pytest.raises(ConfigError):
        default_workers()


def test_values_in_unit_interval():
    r = run_sweep(_task("simultaneous", "9a"), 4)
    r.check_range()
    assert math.isclose(r.series["bare"][0], 0.5, abs_tol=1e-12)


def test_metadata_records_derived_scalars():
    from qfp_sim.single import SingleQubitParams

    p = SingleQubitParams()
    res = run_sweep(SweepTask("single", p, ("energy",), "chi_t", (0.0, 0.5)), 1)
    derived = res.metadata["derived"]
    assert derived["chi"] == p.chi and derived["t_d"] == p.t_d


def test_metadata_skips_undefined_scalars():
    from qfp_sim.single import SingleQubitParams

    from qfp_sim.sweep import _derived_record

    derived = _derived_record(SingleQubitParams(delta_q=0.0))
    assert "t_d" not in derived and derived["chi"] == 0.0
