#!/usr/bin/env python3
"""End-to-end checks of the command-line tool: exit codes, artifact layout,
byte-identical reruns and the report schema."""

import csv
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

EXE = sys.argv[1]
SCHEMA = json.loads(pathlib.Path(sys.argv[2]).read_text())
failures = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def cli(*args):
    return subprocess.run([EXE, *map(str, args)], capture_output=True, text=True)


def header(path):
    with open(path, newline="") as f:
        return next(csv.reader(f))


def rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


SMALL = {
    "name": "small",
    "register": {"n": 3, "uniform_frequency": 1.0},
    "channels": [
        {"coupling": "transverse",
         "spectrum": {"kind": "ohmic", "strength": 1e-4, "cutoff": 10},
         "correlation": {"kind": "full"}},
        {"coupling": "longitudinal",
         "spectrum": {"kind": "white", "strength": 1e-3},
         "correlation": {"kind": "full"}},
    ],
    "initial_state": "plus_all",
    "t_max": 20, "dt_out": 1,
    "protocol": {"kind": "parity", "idle_times": [0, 10, 20]},
    "output": {"svg": False},
}

with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)
    cfg_path = tmp / "small.json"
    cfg_path.write_text(json.dumps(SMALL))

    # usage and validation errors
    check(cli().returncode == 1, "no subcommand exits 1")
    check(cli("frobnicate").returncode == 1, "unknown subcommand exits 1")
    check(cli("run").returncode == 1, "missing argument exits 1")
    check(cli("run", tmp / "missing.json").returncode == 1, "missing config file exits 1")
    bad = dict(SMALL, register={"n": 2, "frequencies": [1.0, -1.0]})
    (tmp / "bad.json").write_text(json.dumps(bad))
    r = cli("run", tmp / "bad.json", "--out", tmp / "bad")
    check(r.returncode == 1 and "frequenc" in r.stderr, "negative frequency rejected with exit 1")
    typo = dict(SMALL, t_maxx=3)
    (tmp / "typo.json").write_text(json.dumps(typo))
    r = cli("run", tmp / "typo.json")
    check(r.returncode == 1 and "t_maxx" in r.stderr, "unknown key named in the error")
    (tmp / "broken.json").write_text('{\n "name": "x",\n ]')
    r = cli("run", tmp / "broken.json")
    check(r.returncode == 1 and "line 3" in r.stderr, "parse error reports the line")

    # numerical failure: an unattainable halving tolerance
    strict = dict(SMALL, integrator={"tolerance": 1e-30, "max_halvings": 0})
    (tmp / "strict.json").write_text(json.dumps(strict))
    r = cli("run", tmp / "strict.json", "--out", tmp / "strict")
    check(r.returncode == 2, "numerical failure exits 2")
    check("evolution" in r.stderr, "failing stage is named")
    check(not (tmp / "strict").exists() or not any((tmp / "strict").iterdir()), "no partial outputs left behind")

    # a full run
    out1, out2 = tmp / "run1", tmp / "run2"
    r = cli("run", cfg_path, "--out", out1)
    check(r.returncode == 0, "run succeeds")
    expected = {"intensity.csv", "antidiagonals.csv", "parity_t0.csv", "parity_t1.csv", "parity_t2.csv",
                "rho_k.csv", "report.json", "manifest.json"}
    present = {p.name for p in out1.iterdir()}
    check(expected <= present, "artifact set " + ", ".join(sorted(expected - present)))
    check(not any(p.name.endswith(".tmp") for p in out1.iterdir()), "no temporary files remain")
    check(header(out1 / "intensity.csv") ==
          ["t", "W", "I_total", "I_local", "I_corr", "I_corr_1", "I_corr_2", "I_corr_3", "Z_1", "Z_2", "Z_3", "min_eig"],
          "intensity.csv columns")
    check(len(rows(out1 / "intensity.csv")) == 21, "one intensity row per sample")
    ad = header(out1 / "antidiagonals.csv")
    check(ad[0] == "t" and len(ad) == 1 + 2 * 4 and ad[1].startswith("Re_") and ad[2].startswith("Im_"),
          "antidiagonals.csv columns")
    check(header(out1 / "rho_k.csv") == ["idle_t", "k", "Re", "Im", "abs"], "rho_k.csv columns")
    check(header(out1 / "parity_t0.csv") == ["phi", "parity"], "parity csv columns")
    check(len(rows(out1 / "parity_t0.csv")) == 7, "2N+1 parity angles")
    report = json.loads((out1 / "report.json").read_text())
    try:
        jsonschema.validate(report, SCHEMA)
        check(True, "report.json validates against the schema")
    except jsonschema.ValidationError as e:
        check(False, "report.json validates against the schema: " + e.message)
    check(report["dephasing_correlated"]["verdict"] == "correlated", "collective dephasing detected")
    check(report["relaxation_correlated"]["verdict"] == "correlated", "collective relaxation detected")
    manifest = json.loads((out1 / "manifest.json").read_text())
    for key in ("version", "config_digest", "files", "runtimes_seconds"):
        check(key in manifest, "manifest has " + key)

    # determinism
    check(cli("run", cfg_path, "--out", out2).returncode == 0, "rerun succeeds")
    same = all((out1 / f).read_bytes() == (out2 / f).read_bytes() for f in expected - {"manifest.json"})
    check(same, "rerun is byte-identical")

    # detect from a directory reproduces the report
    r = cli("detect", out1)
    check(r.returncode == 0, "detect on a directory succeeds")
    again = json.loads(r.stdout)
    jsonschema.validate(again, SCHEMA)
    check(again["relaxation_correlated"] == report["relaxation_correlated"], "relaxation verdict reproduced")
    check(again["dephasing_correlated"] == report["dephasing_correlated"], "dephasing verdict reproduced")
    check(again["correlation_length_estimate"] == report["correlation_length_estimate"], "length estimate reproduced")
    check(cli("detect", tmp).returncode == 1, "detect on a directory without traces exits 1")

    # rates
    r = cli("rates", cfg_path, "--t", 5)
    lines = r.stdout.strip().splitlines()
    check(r.returncode == 0 and lines[0] == "channel,coupling,name,alpha,beta,Re,Im", "rates prints a table")
    check(len(lines) == 1 + 7 * 9 + 2 * 9, "rates covers every coefficient")
    later = cli("rates", cfg_path, "--t", 50).stdout.strip().splitlines()
    check(len(later) == len(lines), "rates extends its horizon past t_max")
    check(cli("rates", cfg_path, "--t=-1").returncode == 1, "negative time exits 1")

    # sweep-n
    r = cli("sweep-n", "superdecoherence", "--n", "2,3,4", "--out", tmp / "sweep")
    check(r.returncode == 0 and "exponent" in r.stdout, "sweep-n reports an exponent")
    sweep_report = json.loads((tmp / "sweep" / "report.json").read_text())
    jsonschema.validate(sweep_report, SCHEMA)
    check(abs(sweep_report["superdecoherence_scaling"]["exponent"] - 2.0) < 0.05, "sweep exponent near 2")
    check(cli("sweep-n", "superdecoherence", "--n", "2,3").returncode == 1, "degenerate sweep exits 1")
    check(cli("sweep-n", "superdecoherence", "--n", "2,x").returncode == 1, "malformed --n exits 1")

    # presets and the trivial no-channel run
    r = cli("presets")
    names = r.stdout.split()
    check(all(p in names for p in ("fig1a", "fig1b", "fig1c", "fig2", "fig2d")), "figure presets listed")
    check(json.loads(cli("presets", "fig1b").stdout)["register"]["n"] == 5, "preset text is JSON")
    check(cli("presets", "nope").returncode == 1, "unknown preset exits 1")
    r = cli("run", "quiet", "--out", tmp / "quiet")
    check(r.returncode == 0, "quiet preset runs")
    check(all(float(row["I_total"]) == 0.0 for row in rows(tmp / "quiet" / "intensity.csv")),
          "no channels: I_total is identically zero")

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
