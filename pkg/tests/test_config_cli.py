import csv
import io
import json
import math

import numpy as np
import pytest

from qedsat.cli import TRAJECTORY_HEADER, fmt, main
from qedsat.config import RunConfig, load_config, parse_angle, parse_grid, parse_initial, parse_regime
from qedsat.dynamics import closed_form_concurrence_ur_bhabha, closed_form_random_product
from qedsat.entanglement import classify, fidelity
from qedsat.errors import ConfigError


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def state_of(row):
    v = [float(x) for x in row[3:]]
    return np.array(v[0::2]) + 1j * np.array(v[1::2])


# -- parsing -----------------------------------------------------------------


@pytest.mark.parametrize(
    "text, value",
    [("pi/4", math.pi / 4), ("3pi/4", 3 * math.pi / 4), ("π", math.pi), ("0.5", 0.5), ("-pi/8 + 1", 1 - math.pi / 8)],
)
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value)


@pytest.mark.parametrize("text", ["__import__('os')", "pi/0", "x", "1e999"])
def test_parse_angle_rejects(text):
    with pytest.raises(ConfigError):
        parse_angle(text)


def test_parse_regime():
    assert math.isinf(parse_regime("ur")) and parse_regime("0.01") == 0.01
    for bad in ("-1", "0", "fast"):
        with pytest.raises(ConfigError) as err:
            parse_regime(bad)
        assert err.value.field == "regime"


def test_parse_initial():
    assert fidelity(parse_initial("RL"), [0, 1, 0, 0]) == 1.0
    s = parse_initial("1, 0, 0, 1i")
    np.testing.assert_allclose(s.amps, np.array([1, 0, 0, 1j]) / math.sqrt(2))
    for bad in ("0,0,0,0", "1,2", "a,b,c,d"):
        with pytest.raises(ConfigError):
            parse_initial(bad)


def test_parse_grid():
    assert parse_grid("linspace(0, 1, 3)", angle=False) == [0.0, 0.5, 1.0]
    assert parse_grid("open(0, pi, 3)") == pytest.approx([math.pi / 4, math.pi / 2, 3 * math.pi / 4])
    assert parse_grid("pi/4, pi/2") == pytest.approx([math.pi / 4, math.pi / 2])
    with pytest.raises(ConfigError):
        parse_grid("linspace(0, 1)")


def test_config_file_and_overrides(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[run]\nprocess = moller\nregime = 0.5\nsteps = 7\n[tolerances]\nsaturation-tol = 1e-8\n")
    cfg = load_config(str(ini), {"steps": 9, "theta": None})
    assert cfg.process_kind.value == "moller" and cfg.mu == 0.5
    assert cfg.steps_value == 9 and cfg.tol_value == 1e-8 and cfg.theta == "pi/4"


def test_config_unknown_key(tmp_path):
    ini = tmp_path / "bad.ini"
    ini.write_text("[run]\nprocess = bhabha\nspeed = 3\n")
    with pytest.raises(ConfigError) as err:
        load_config(str(ini))
    assert err.value.field == "speed"


@pytest.mark.parametrize(
    "fields, command, bad",
    [
        ({"process": "muon"}, "iterate", "process"),
        ({"steps": "0"}, "iterate", "steps"),
        ({"steps": "many"}, "iterate", "steps"),
        ({"theta": "0"}, "iterate", "theta"),
        ({"saturation_tol": "2"}, "iterate", "saturation_tol"),
        ({"saturation_window": "0"}, "iterate", "saturation_window"),
        ({}, "random-walk", "seed"),
        ({"axis": "phi", "grid": "1"}, "sweep", "axis"),
        ({"axis": "theta"}, "sweep", "grid"),
        ({"axis": "theta", "grid": "0.5, 4"}, "sweep", "grid"),
        ({"axis": "mu", "grid": "1, -2"}, "sweep", "grid"),
    ],
)
def test_validation_names_field(fields, command, bad):
    cfg = RunConfig(**fields)
    with pytest.raises(ConfigError) as err:
        cfg.validate(command)
    assert err.value.field == bad
    assert bad in str(err.value)


def test_fmt():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(-0.0) == "0" and fmt(float("nan")) == "nan"
    assert float(fmt(math.pi)) == math.pi


# -- commands ----------------------------------------------------------------


def test_iterate_csv(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["iterate", "--process", "bhabha", "--regime", "ur", "--initial", "RL", "--theta", "pi/4",
                 "--steps", "50", "--csv", str(out), "--svg", str(tmp_path / "t.svg")]) == 0
    rows = read_csv(out)
    assert rows[0] == TRAJECTORY_HEADER
    assert len(rows) == 52 and [r[0] for r in rows[1:]] == [str(k) for k in range(51)]
    assert rows[1][1] == "nan"
    assert float(rows[-1][2]) == pytest.approx(closed_form_concurrence_ur_bhabha(math.pi / 4, 50), abs=1e-12)
    raw = out.read_bytes()
    assert b"\r" not in raw
    assert (tmp_path / "t.svg").read_text().startswith("<svg")


def test_iterate_deterministic(tmp_path):
    args = ["iterate", "--process", "moller", "--regime", "0.3", "--initial", "0.6, 0.8i, 0, 0", "--seed", "11",
            "--steps", "40"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--csv", str(a)]) == 0
    assert main(args + ["--csv", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_iterate_theta_pi(tmp_path):
    out = tmp_path / "pi.csv"
    assert main(["iterate", "--theta", "pi", "--steps", "50", "--csv", str(out)]) == 0
    assert max(float(r[2]) for r in read_csv(out)[1:]) <= 1e-15


def test_iterate_moller_rr_nonrel(tmp_path):
    out = tmp_path / "m.csv"
    assert main(["iterate", "--process", "moller", "--regime", "0.01", "--initial", "RR", "--steps", "2000",
                 "--csv", str(out)]) == 0
    cls = classify(state_of(read_csv(out)[-1]))
    assert cls.which == "Phi-"


def test_iterate_stdout(capsys):
    assert main(["iterate", "--steps", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(TRAJECTORY_HEADER) and len(lines) == 4


def test_config_flag(tmp_path):
    ini = tmp_path / "c.ini"
    out = tmp_path / "c.csv"
    ini.write_text(f"[run]\nprocess = bhabha\nsteps = 3\n[output]\ncsv = {out}\n")
    assert main(["iterate", "--config", str(ini), "--steps", "5"]) == 0
    assert len(read_csv(out)) == 7


def test_exit_codes(tmp_path, capsys):
    assert main(["iterate", "--steps", "-1"]) == 2
    assert "steps" in capsys.readouterr().err
    assert main(["iterate", "--config", str(tmp_path / "missing.ini")]) == 2
    assert main(["iterate", "--process", "annihilation", "--initial", "RR", "--steps", "3"]) == 3
    assert main(["iterate", "--theta", "1e-14", "--regime", "1"]) == 3
    assert main(["iterate", "--csv", str(tmp_path / "no" / "dir.csv"), "--steps", "1"]) == 3
    assert main(["bogus"]) == 2


def test_random_walk(tmp_path, capsys):
    out = tmp_path / "rw.csv"
    assert main(["random-walk", "--seed", "42", "--steps", "200", "--csv", str(out), "--check-closed-form"]) == 0
    text = capsys.readouterr().out
    fid = float(text.split("closed-form fidelity:")[1])
    assert fid >= 1 - 1e-10
    sched = read_csv(f"{out}.schedule.csv")
    assert sched[0] == ["theta", "k"] and sum(int(r[1]) for r in sched[1:]) == 200
    realized = [(float(r[0]), int(r[1])) for r in sched[1:]]
    final = state_of(read_csv(out)[-1])
    assert fidelity(final, closed_form_random_product(realized)) >= 1 - 1e-10


def test_random_walk_seeds(tmp_path):
    for seed in range(10):
        out = tmp_path / f"s{seed}.csv"
        assert main(["random-walk", "--seed", str(seed), "--steps", "200", "--csv", str(out)]) == 0
        assert float(read_csv(out)[-1][2]) >= 1 - 1e-6


def test_random_walk_single_step_matches_iterate(tmp_path):
    rw, it = tmp_path / "rw.csv", tmp_path / "it.csv"
    assert main(["random-walk", "--seed", "5", "--steps", "1", "--csv", str(rw)]) == 0
    theta = read_csv(f"{rw}.schedule.csv")[1][0]
    assert main(["iterate", "--theta", theta, "--steps", "1", "--csv", str(it)]) == 0
    assert read_csv(rw)[-1] == read_csv(it)[-1]


def test_random_walk_closed_form_needs_ur_bhabha():
    assert main(["random-walk", "--seed", "1", "--regime", "0.5", "--check-closed-form"]) == 2


def test_sweep_ordering(tmp_path):
    out = tmp_path / "sw.csv"
    assert main(["sweep", "--axis", "theta", "--grid", "2.0, 0.5, 1.0", "--steps", "4", "--workers", "3",
                 "--csv", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["axis_value", "n", "concurrence"]
    keys = [(float(r[0]), int(r[1])) for r in rows[1:]]
    assert keys == sorted(keys) and len(keys) == 15


def test_sweep_mu_deterministic(tmp_path):
    args = ["sweep", "--axis", "mu", "--grid", "10, 0.1, 1", "--initial", "RR", "--steps", "30"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--csv", str(a), "--workers", "1"]) == 0
    assert main(args + ["--csv", str(b), "--workers", "4"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_asymptote_table(tmp_path):
    out = tmp_path / "t.json"
    assert main(["asymptote-table", "-o", str(out)]) == 0
    rows = json.loads(out.read_text())
    assert len(rows) >= 8
    by_key = {(r["process"], r["initial"], r["regime"]): r for r in rows}
    assert by_key[("bhabha", "RL", "ur")]["predicted"] == "Psi+"
    assert by_key[("bhabha", "RR", "nr")]["predicted"] == "Phi+"
    assert by_key[("annihilation", "RL", "ur")]["predicted"] == "Psi-"
    assert by_key[("annihilation", "RR", "ur")]["classification"] == "not_maximal"
    for r in rows:
        assert {"process", "initial", "regime", "predicted", "classification", "fidelity"} <= set(r)
    again = tmp_path / "u.json"
    main(["asymptote-table", "-o", str(again)])
    assert out.read_bytes() == again.read_bytes()


def test_verify_fast(capsys):
    assert main(["verify", "fast"]) == 0
    out = capsys.readouterr().out
    assert "[FAIL]" not in out and "checks passed" in out


def test_verify_fault(capsys):
    assert main(["verify", "fast", "--inject-fault", "amplitude"]) == 1
    out = capsys.readouterr().out
    assert "[FAIL] maps: bhabha symbol pattern" in out
    assert "failed:" in out


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "qedsat", "iterate", "--steps", "1"], capture_output=True, text=True)
    assert res.returncode == 0
    assert list(csv.reader(io.StringIO(res.stdout)))[0] == TRAJECTORY_HEADER
