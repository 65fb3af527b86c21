"""Command-line interface tests.

The CLI runs the service in-process, so these tests cover the full
stack: argument parsing, config-file defaults and flag precedence,
file plumbing (--out, inline mesh references), and output formats.
"""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from hexswitch.cli import main
from hexswitch.meshdoc import export_mesh


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def mesh_file(tmp_path, mesh1):
    path = tmp_path / "mesh1.json"
    path.write_text(json.dumps(export_mesh(mesh1)))
    return path


def _write_json(path, doc):
    path.write_text(json.dumps(doc))
    return path


def _problem_file(tmp_path, routes, max_route_length, name="problem.json"):
    doc = {
        "mesh": "mesh1.json",
        "routes": [{"id": i, "source": s, "drain": d} for i, s, d in routes],
        "L": max_route_length,
    }
    return _write_json(tmp_path / name, doc)


# -- mesh --------------------------------------------------------------------


def test_mesh_build_prints_document(runner):
    result = runner.invoke(main, ["mesh", "build", "1", "1"])
    assert result.exit_code == 0
    doc = json.loads(result.stdout)
    assert doc["height"] == 1 and doc["width"] == 1
    assert len(doc["arms"]) == 48
    assert result.stdout.endswith("\n")


def test_mesh_build_out_flag_writes_file(runner, tmp_path):
    target = tmp_path / "mesh.json"
    result = runner.invoke(main, ["mesh", "build", "1", "1", "--out", str(target)])
    assert result.exit_code == 0
    assert result.stdout == ""
    assert json.loads(target.read_text())["height"] == 1


def test_mesh_info(runner, mesh_file):
    result = runner.invoke(main, ["mesh", "info", str(mesh_file)])
    assert result.exit_code == 0
    info = json.loads(result.stdout)
    assert info["pucs"] == 6
    assert info["ports"] == 12
    assert info["port_order"][0] == "p0"


def test_mesh_export_dot(runner, mesh_file):
    result = runner.invoke(main, ["mesh", "export", str(mesh_file), "--format", "dot"])
    assert result.exit_code == 0
    assert result.stdout.startswith("digraph mesh {")
    assert '"p0"' in result.stdout
    assert "[label=" in result.stdout


def test_mesh_export_rejects_broken_document(runner, tmp_path, mesh1):
    doc = export_mesh(mesh1)
    doc["arms"] = doc["arms"][:-1]
    path = _write_json(tmp_path / "broken.json", doc)
    result = runner.invoke(main, ["mesh", "export", str(path)])
    assert result.exit_code != 0
    assert "invalid mesh (arm_count)" in result.stderr


def test_mesh_build_rejects_zero(runner):
    result = runner.invoke(main, ["mesh", "build", "0", "1"])
    assert result.exit_code != 0


# -- solve / verify ------------------------------------------------------------


def test_solve_resolves_mesh_reference(runner, tmp_path, mesh_file):
    problem = _problem_file(tmp_path, [(0, "p0", "p7")], 1)
    result = runner.invoke(main, ["solve", str(problem)])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["status"] == "infeasible"


def test_solve_preset_relaxes_length_budget(runner, tmp_path, mesh_file):
    problem = _problem_file(tmp_path, [(0, "p0", "p7")], 1)
    result = runner.invoke(main, ["solve", str(problem), "--preset", "lossless17"])
    assert result.exit_code == 0
    body = json.loads(result.stdout)
    assert body["status"] == "optimal"
    assert body["objective"] == 2.0


def test_solve_missing_file(runner, tmp_path):
    result = runner.invoke(main, ["solve", str(tmp_path / "nope.json")])
    assert result.exit_code != 0
    assert "cannot read" in result.stderr


def test_solve_rejects_non_object_document(runner, tmp_path):
    path = _write_json(tmp_path / "list.json", [1, 2])
    result = runner.invoke(main, ["solve", str(path)])
    assert result.exit_code != 0
    assert "must hold a problem document" in result.stderr


def test_verify_exit_codes(runner, tmp_path, mesh_file):
    problem = _problem_file(tmp_path, [(0, "p0", "p3")], 4)
    solution = tmp_path / "solution.json"
    assert (
        runner.invoke(main, ["solve", str(problem), "--out", str(solution)]).exit_code
        == 0
    )

    clean = runner.invoke(main, ["verify", str(problem), str(solution)])
    assert clean.exit_code == 0
    assert json.loads(clean.stdout) == {"violations": []}

    tight = _problem_file(tmp_path, [(0, "p0", "p3")], 0.5, name="tight.json")
    dirty = runner.invoke(main, ["verify", str(tight), str(solution)])
    assert dirty.exit_code == 1
    violations = json.loads(dirty.stdout)["violations"]
    assert [v["rule"] for v in violations] == ["Eq1"]


# -- rotor ---------------------------------------------------------------------


def test_rotor_gen(runner):
    result = runner.invoke(
        main, ["rotor", "gen", "--height", "1", "--width", "1", "--radix", "2"]
    )
    assert result.exit_code == 0
    doc = json.loads(result.stdout)
    assert [(b["index"], b["tx"], b["rx"]) for b in doc["bindings"]] == [
        (0, "p0", "p1"),
        (1, "p6", "p7"),
    ]


def test_rotor_gen_needs_mesh_or_dimensions(runner):
    result = runner.invoke(main, ["rotor", "gen", "--radix", "2"])
    assert result.exit_code != 0
    assert "give either --mesh or both --height and --width" in result.stderr


def test_rotor_run(runner):
    result = runner.invoke(
        main, ["rotor", "run", "--height", "1", "--width", "1", "--radix", "2"]
    )
    assert result.exit_code == 0
    doc = json.loads(result.stdout)
    assert doc["feasible"] is True
    assert doc["matchings"][0]["latency_ms"] == 283.134


def test_rotor_run_needs_radix_or_schedule(runner):
    result = runner.invoke(main, ["rotor", "run", "--height", "1", "--width", "1"])
    assert result.exit_code != 0
    assert "give either --radix or --schedule" in result.stderr


def test_rotor_run_from_schedule_file(runner, tmp_path):
    gen = runner.invoke(
        main,
        ["rotor", "gen", "--height", "1", "--width", "1", "--radix", "2",
         "--out", str(tmp_path / "schedule.json")],
    )
    assert gen.exit_code == 0
    result = runner.invoke(
        main,
        ["rotor", "run", "--height", "1", "--width", "1",
         "--schedule", str(tmp_path / "schedule.json")],
    )
    assert result.exit_code == 0
    assert json.loads(result.stdout)["feasible"] is True


# -- bench ---------------------------------------------------------------------


def test_bench_radix_csv(runner):
    result = runner.invoke(
        main,
        ["bench", "radix", "--height", "1", "--width", "1", "--radices", "2"],
    )
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert lines[0].startswith("experiment,")
    assert lines[1].startswith("radix,1,1,2,1,optimal,6,")


def test_bench_radix_rejects_bad_list(runner):
    result = runner.invoke(
        main,
        ["bench", "radix", "--height", "1", "--width", "1", "--radices", "x"],
    )
    assert result.exit_code != 0
    assert "--radices must be a comma-separated list of integers" in result.stderr


def test_bench_meshscale_csv(runner):
    result = runner.invoke(main, ["bench", "meshscale", "--sizes", "1"])
    assert result.exit_code == 0
    assert len(result.stdout.splitlines()) == 4


# -- predict -------------------------------------------------------------------


def test_predict_plain_text(runner):
    result = runner.invoke(main, ["predict", "17"])
    assert result.exit_code == 0
    assert result.stdout == "9.41 Gb/s, 0% loss\n"


def test_predict_out_file(runner, tmp_path):
    target = tmp_path / "rate.txt"
    result = runner.invoke(main, ["predict", "17", "--out", str(target)])
    assert result.exit_code == 0
    assert target.read_text() == "9.41 Gb/s, 0% loss\n"


# -- config --------------------------------------------------------------------


def _write_config(tmp_path, text):
    path = tmp_path / "config.toml"
    path.write_text(text)
    return path


def test_config_bitrate_table(runner, tmp_path):
    cfg = _write_config(tmp_path, "[bitrate]\ntable = [[9, 40.0, 0.5]]\n")
    result = runner.invoke(main, ["--config", str(cfg), "predict", "17"])
    assert result.exit_code == 0
    assert result.stdout == "40 Gb/s, 0.5% loss\n"


def test_config_from_environment(runner, tmp_path):
    cfg = _write_config(tmp_path, "[bitrate]\ntable = [[9, 40.0, 0.5]]\n")
    result = runner.invoke(main, ["predict", "17"], env={"HEXSWITCH_CONFIG": str(cfg)})
    assert result.exit_code == 0
    assert result.stdout == "40 Gb/s, 0.5% loss\n"


def test_config_latency_reaches_rotor_run(runner, tmp_path):
    cfg = _write_config(tmp_path, "[latency]\nper_puc_ms = 10.0\n")
    result = runner.invoke(
        main,
        ["--config", str(cfg), "rotor", "run",
         "--height", "1", "--width", "1", "--radix", "2"],
    )
    assert result.exit_code == 0
    assert json.loads(result.stdout)["matchings"][0]["latency_ms"] == 60.0


def test_config_policy_default_and_flag_override(runner, tmp_path):
    cfg = _write_config(tmp_path, '[rotor]\npolicy = "corners"\n')
    base = ["--config", str(cfg), "rotor", "gen",
            "--height", "1", "--width", "1", "--radix", "2"]

    from_config = runner.invoke(main, base)
    assert from_config.exit_code == 0
    doc = json.loads(from_config.stdout)
    assert doc["policy"] == "corners"
    assert [(b["tx"], b["rx"]) for b in doc["bindings"]] == [
        ("p0", "p11"),
        ("p1", "p10"),
    ]

    overridden = runner.invoke(main, base + ["--policy", "spread"])
    assert overridden.exit_code == 0
    doc = json.loads(overridden.stdout)
    assert doc["policy"] == "spread"
    assert [(b["tx"], b["rx"]) for b in doc["bindings"]] == [
        ("p0", "p1"),
        ("p6", "p7"),
    ]


def test_config_rejects_bad_toml(runner, tmp_path):
    cfg = _write_config(tmp_path, "not = [toml\n")
    result = runner.invoke(main, ["--config", str(cfg), "predict", "17"])
    assert result.exit_code != 0
    assert "not valid TOML" in result.stderr


def test_config_rejects_unknown_latency_key(runner, tmp_path):
    cfg = _write_config(tmp_path, "[latency]\nnope = 1.0\n")
    result = runner.invoke(main, ["--config", str(cfg), "predict", "17"])
    assert result.exit_code != 0
    assert "config latency.nope is not a recognized key" in result.stderr
