import csv
import io
import json
import math
from pathlib import Path

import numpy as np
import pytest

from dipolarq.cli import main
from dipolarq.coherence import _coherence
from dipolarq.correlations import geometric_discord
from dipolarq.model import ReducedParams, populations
from dipolarq.quadrature import monte_carlo_sphere
from dipolarq.sweep import SweepConfig, evaluate_grid, render_sweep

FIXTURES = Path(__file__).parent / "fixtures"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_point_origin(capsys):
    code, out, _ = run(capsys, "point", "--a", "0", "--r", "0")
    rec = json.loads(out)
    assert code == 0
    assert rec["discord"] == 0 and rec["concurrence"] == 0 and rec["coherence_z"] == 0
    assert rec["partition_function"] == pytest.approx(4)
    assert rec["coherence_avg"] == pytest.approx(0, abs=1e-6)
    assert rec["coherence_avg_converged"] is True


def test_point_ridge(capsys):
    code, out, _ = run(capsys, "point", "--a", "0", "--r", "10", "--theta", "0.4", "--phi", "1.0")
    rec = json.loads(out)
    assert code == 0
    assert rec["discord"] == pytest.approx(0.5 * math.tanh(2.5), abs=1e-12)
    assert rec["ground_state"] == "Phi-"
    assert rec["correlated_coherence"] == pytest.approx(rec["coherence_at"], abs=1e-12)
    total = sum(rec[k] for k in ("p_psi_minus", "p_psi_plus", "p_phi_plus", "p_phi_minus"))
    assert total == pytest.approx(1, abs=1e-14)


def test_point_degenerate_and_csv(capsys):
    code, out, _ = run(capsys, "point", "--a", "10", "--r", "10", "--format", "csv")
    table = dict(rows(out)[1:])
    assert code == 0
    assert table["ground_state"] == "degenerate"
    assert table["coherence_avg_converged"] == "true"


def test_point_physical_units(capsys):
    _, a, _ = run(capsys, "point", "--delta-kelvin", "2", "--eps-kelvin", "1", "--temp-kelvin", "0.5")
    _, b, _ = run(capsys, "point", "--a", "4", "--r", "2")
    assert json.loads(a) == json.loads(b)


def test_point_out_of_range_reports_null(capsys):
    code, out, _ = run(capsys, "point", "--a", "3000", "--r", "0")
    rec = json.loads(out)
    assert code == 0
    assert rec["discord"] is None and "discord_error" in rec


def test_sweep_csv_layout(capsys):
    code, out, _ = run(capsys, "sweep", "--steps-a", "5", "--steps-r", "4")
    table = rows(out)
    assert code == 0
    assert table[0] == ["a", "r", "value"]
    assert len(table) == 1 + 20
    a = [float(t[0]) for t in table[1:]]
    assert a == sorted(a)
    for t in table[1:]:
        assert float(t[2]) == float(geometric_discord(ReducedParams(float(t[0]), float(t[1]))))


def test_sweep_discord_bounds(capsys):
    _, out, _ = run(capsys, "sweep", "--steps-a", "41", "--steps-r", "41")
    v = np.array([float(t[2]) for t in rows(out)[1:]])
    assert np.all(v >= 0) and np.all(v <= 0.5)


def test_sweep_populations(capsys):
    _, out, _ = run(capsys, "sweep", "--quantity", "populations", "--steps-a", "7", "--steps-r", "7")
    table = rows(out)
    assert table[0][2:] == ["p_psi_minus", "p_psi_plus", "p_phi_plus", "p_phi_minus"]
    for t in table[1:]:
        p = [float(x) for x in t[2:]]
        assert sum(p) == pytest.approx(1, abs=1e-14)
        want = populations(ReducedParams(float(t[0]), float(t[1]))).as_array()
        assert np.allclose(p, want, rtol=0, atol=1e-16)


def test_sweep_temperature_scales_axes(capsys):
    _, hot, _ = run(capsys, "sweep", "--steps-a", "3", "--steps-r", "3", "--temperature", "2")
    _, ref, _ = run(capsys, "sweep", "--steps-a", "3", "--steps-r", "3", "--a-min", "-5", "--a-max", "5",
                    "--r-min", "-5", "--r-max", "5")
    assert hot == ref


@pytest.mark.parametrize("threads", [4, 8])
def test_threads_do_not_change_bytes(capsys, threads):
    base = ("sweep", "--quantity", "coherence_at", "--theta", "0.7", "--phi", "2.1",
            "--steps-a", "23", "--steps-r", "17")
    _, one, _ = run(capsys, *base, "--threads", "1")
    _, many, _ = run(capsys, *base, "--threads", str(threads))
    assert one == many


def test_json_and_csv_agree_exactly(capsys):
    grid = ("--steps-a", "9", "--steps-r", "11", "--quantity", "coherence_x")
    _, c, _ = run(capsys, "sweep", *grid)
    _, j, _ = run(capsys, "sweep", *grid, "--format", "json")
    doc = json.loads(j)
    assert doc["meta"]["columns"] == ["a", "r", "value"]
    assert doc["meta"]["config"]["quantity"] == "coherence_x"
    assert {"version", "git_describe"} <= set(doc["meta"])
    from_csv = [[float(x) for x in t] for t in rows(c)[1:]]
    assert from_csv == doc["data"]  # 17 digits round trip to the same doubles


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"quantity": "concurrence", "steps_a": 3, "steps_r": 3, "a_min": 0, "a_max": 2}))
    _, out, _ = run(capsys, "sweep", "--config", str(cfg), "--steps-r", "2")
    table = rows(out)
    assert len(table) == 1 + 6
    assert {t[0] for t in table[1:]} == {"0", "1", "2"}


def test_output_file(tmp_path, capsys):
    path = tmp_path / "out.csv"
    code, out, _ = run(capsys, "sweep", "--steps-a", "3", "--steps-r", "3", "-o", str(path))
    assert code == 0 and out == ""
    assert path.read_text().startswith("a,r,value\n")


@pytest.mark.parametrize("argv", [
    ("sweep", "--a-min", "3", "--a-max", "1"),
    ("sweep", "--steps-a", "1"),
    ("sweep", "--quantity", "coherence_at"),
    ("sweep", "--threads", "0"),
    ("point", "--a", "1"),
    ("point", "--a", "1", "--r", "1", "--delta-kelvin", "1", "--eps-kelvin", "1"),
    ("point", "--delta-kelvin", "1", "--eps-kelvin", "1", "--temp-kelvin", "-1"),
])
def test_argument_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_bad_config_contents(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"steps": 3}))
    assert run(capsys, "sweep", "--config", str(cfg))[0] == 2
    cfg.write_text("{")
    assert run(capsys, "sweep", "--config", str(cfg))[0] == 2


def test_unknown_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--nope"])
    assert exc.value.code == 2


def test_io_errors(tmp_path, capsys):
    assert run(capsys, "sweep", "--config", str(tmp_path / "missing.json"))[0] == 3
    target = tmp_path / "no" / "such" / "dir.csv"
    assert run(capsys, "sweep", "--steps-a", "2", "--steps-r", "2", "-o", str(target))[0] == 3


def test_out_of_range_cells_are_nan(capsys):
    code, out, err = run(capsys, "sweep", "--a-min", "1000", "--a-max", "2000", "--steps-a", "3", "--steps-r", "2")
    values = [t[2] for t in rows(out)[1:]]
    assert code == 0
    assert "nan" in values and values.count("nan") < len(values)
    assert "out of range" in err
    _, j, _ = run(capsys, "sweep", "--a-min", "1000", "--a-max", "2000", "--steps-a", "3", "--steps-r", "2",
                  "--format", "json")
    assert None in [row[2] for row in json.loads(j)["data"]]


def test_unconverged_sweep_exits_4(capsys, monkeypatch):
    import dipolarq.coherence as coh
    from functools import partial
    monkeypatch.setattr(coh, "integrate_sphere", partial(coh.integrate_sphere, max_depth=2))
    code, out, err = run(capsys, "sweep", "--quantity", "coherence_avg", "--steps-a", "2", "--steps-r", "2",
                         "--a-min", "3", "--a-max", "4", "--quad-tol", "1e-10")
    assert code == 4 and "did not reach" in err
    assert len(rows(out)) == 5


def test_boundary_output(capsys):
    code, out, _ = run(capsys, "boundary", "--steps-a", "81", "--steps-r", "81")
    table = rows(out)
    assert code == 0
    assert table[0] == ["curve", "segment", "index", "a", "r"]
    curves = {t[0] for t in table[1:]}
    assert curves == {"concurrence", "crossing"}
    on_axis = [abs(float(t[4])) for t in table[1:] if t[0] == "concurrence" and abs(float(t[3])) < 1e-12]
    assert on_axis and all(abs(r - 2 * math.asinh(1)) < 0.25 for r in on_axis)
    starts = [(float(t[3]), float(t[4])) for t in table[1:] if t[0] == "crossing" and t[2] == "0"]
    assert starts == [(0.0, 0.0)] * 3


def test_boundary_json(capsys):
    _, out, _ = run(capsys, "boundary", "--steps-a", "21", "--steps-r", "21", "--format", "json")
    doc = json.loads(out)
    assert doc["meta"]["columns"] == ["curve", "segment", "index", "a", "r"]
    assert all(len(r) == 5 for r in doc["data"])


def test_coherence_avg_grid_matches_monte_carlo():
    config = SweepConfig(quantity="coherence_avg", a_min=-6, a_max=6, r_min=-6, r_max=6, steps_a=3, steps_r=3)
    a_axis, r_axis, grid = evaluate_grid(config)
    for row in grid:
        for r, value in zip(r_axis, row.values):
            pop = populations(ReducedParams(float(a_axis[row.index]), float(r)))
            mean, se = monte_carlo_sphere(lambda t, f: _coherence(pop, t, f), 200_000, seed=row.index)
            assert abs(value - mean) <= max(4 * se, 1e-6)


def test_fixture_bytes():
    config = SweepConfig()
    text = render_sweep(config, *evaluate_grid(config))
    assert text == (FIXTURES / "discord_201.csv").read_text()
