import json

import pytest

from rainbowturan import cli
from rainbowturan.errors import SpecError
from rainbowturan.experiment import ExperimentSpec, run_experiment
from rainbowturan.graph import load_any
from rainbowturan.params import DESK, derive_seed, desk_params, formula_params, param_calculator


# -- seeds and parameters ----------------------------------------------------------

def test_derive_seed_deterministic_and_keyed():
    assert derive_seed(3, "a", 1) == derive_seed(3, "a", 1)
    assert derive_seed(3, "a", 1) != derive_seed(3, "a", 2)
    assert derive_seed(3, "a") != derive_seed(4, "a")


def test_derive_seed_none_and_range():
    assert derive_seed(None, "x") is None
    for i in range(50):
        v = derive_seed(i, "k")
        assert 0 <= v < 2 ** 63


def test_formula_params_at_2_pow_20():
    p = formula_params(2 ** 20, 0.5, 3)
    assert p.eta == pytest.approx(0.0125)
    assert p.k == 65_536_000
    assert p.L == pytest.approx(131_072_000)
    assert p.ell == pytest.approx(6400)
    assert p.q == pytest.approx(1_638_400)
    assert p.s == 393_216_000
    assert p.p == 24
    assert not p.feasible


def test_formula_params_k_even_and_eta_monotone():
    etas = [formula_params(1000, e).eta for e in (0.1, 0.2, 0.3, 0.5)]
    assert etas == sorted(etas)
    for n in (10, 37, 1000, 12345):
        assert formula_params(n).k % 2 == 0


def test_formula_params_rejects_tiny_n():
    with pytest.raises(ValueError):
        formula_params(1)


def test_desk_params_defaults_and_scaling():
    p = desk_params()
    assert (p.k, p.s, p.ell, p.q, p.L) == (2, 3, 2, 2.0, 8)
    big = desk_params(2.0)
    assert (big.k, big.s, big.ell, big.q) == (4, 6, 4, 4.0)
    assert big.L == 2 * (big.ell + 1) + big.k
    assert desk_params(0.1).k == 2
    assert desk_params(1.0, s=5).s == 5
    with pytest.raises(ValueError):
        desk_params(0)


def test_pipeline_params_validation():
    with pytest.raises(ValueError):
        DESK.with_(k=0)
    with pytest.raises(ValueError):
        DESK.with_(mode="bogus")


def test_param_calculator_notes_and_blowup_keys():
    sheet = param_calculator(2 ** 20, r=2)
    assert any("infeasible at this n" in note for note in sheet["notes"])
    assert "blowup_degree_threshold" in sheet["formula"]
    assert sheet["used"]["L"] == 8


# -- experiment specs --------------------------------------------------------------

def test_spec_errors():
    with pytest.raises(SpecError):
        ExperimentSpec.parse("")
    with pytest.raises(SpecError):
        ExperimentSpec.parse("[generator]\nkind = 'gnp'\n")
    with pytest.raises(SpecError):
        ExperimentSpec.parse("[generator]\nkind = 'nope'\n[pipeline]\nkind = 'subdivision'\n")
    with pytest.raises(SpecError):
        ExperimentSpec.parse("[generator]\nkind = 'gnp'\n[pipeline]\nkind = 'nope'\n")
    with pytest.raises(SpecError):
        ExperimentSpec.parse("this is = = not toml")


def test_spec_seeds():
    s = ExperimentSpec.parse("seed = 5\nrepetitions = 3\n[generator]\nkind = 'hypercube'\nk = 3\n"
                             "[pipeline]\nkind = 'subdivision'\n")
    assert s.seeds == [derive_seed(5, "repetition", i) for i in range(3)]
    s2 = ExperimentSpec.parse("seeds = [1, 2]\n[generator]\nkind = 'hypercube'\nk = 3\n"
                              "[pipeline]\nkind = 'subdivision'\n")
    assert s2.seeds == [1, 2]


HYPERCUBE_SPEC = """
name = "cube"
seed = 1
repetitions = 2
[generator]
kind = "hypercube"
k = 3
[pipeline]
kind = "subdivision"
m = 3
"""


def test_run_experiment_hypercube_fails_cleanly(tmp_path):
    summary = run_experiment(HYPERCUBE_SPEC, tmp_path / "out")
    assert summary["successes"] == 0
    assert all(r["status"] in ("NoCliqueOfGoodPairs", "RoundsExhausted") for r in summary["records"])
    assert set(p.name for p in (tmp_path / "out").iterdir()) == {"records.jsonl", "summary.json", "records.csv"}
    lines = (tmp_path / "out" / "records.jsonl").read_text().splitlines()
    assert len(lines) == 2
    again = run_experiment(HYPERCUBE_SPEC)
    assert [r["status"] for r in again["records"]] == [r["status"] for r in summary["records"]]
    assert [r["seed"] for r in again["records"]] == [r["seed"] for r in summary["records"]]


def test_run_experiment_crfree(tmp_path):
    spec = ("seeds = [0]\n[generator]\nkind = 'crfree'\nn = 60\nr = 1\nkmax = 4\n"
            "[pipeline]\nkind = 'crfree'\n")
    summary = run_experiment(spec)
    assert summary["records"][0]["status"] == "ok"
    assert summary["records"][0]["result"]["final_edges"] > 0


# -- CLI ------------------------------------------------------------------------------

def run_cli(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_gen_hypercube(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "gen", "hypercube", "--k", 3)
    assert code == 0
    path = tmp_path / "q3.txt"
    path.write_text(out)
    g = load_any(path)
    assert g.n == 8 and g.graph.m == 12


def test_cli_params(capsys):
    code, out, _ = run_cli(capsys, "params", "--n", 2 ** 20)
    assert code == 0
    sheet = json.loads(out)
    assert sheet["formula"]["k"] == 65_536_000


def test_cli_usage_error_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["walks", "count"])
    assert exc.value.code == 2


def test_cli_missing_file_exit_1(capsys, tmp_path):
    code, _, err = run_cli(capsys, "spectral", "summary", "--graph", tmp_path / "none.txt")
    assert code == 1
    assert "error" in err


def test_cli_walk_count_csv(capsys, tmp_path):
    g = tmp_path / "c4.txt"
    g.write_text("0 1\n1 2\n2 3\n3 0\n")
    csv_path = tmp_path / "w.csv"
    code, out, _ = run_cli(capsys, "walks", "count", "--graph", g, "--k", 2, "--csv-out", csv_path)
    assert code == 0
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "x,y,paths,cycles"
    assert len(rows) > 1


def test_cli_janzer_and_spectral(capsys, tmp_path):
    g = tmp_path / "k33.txt"
    g.write_text("".join(f"{a} {b}\n" for a in range(3) for b in range(3, 6)))
    code, out, _ = run_cli(capsys, "walks", "janzer-check", "--graph", g, "--k", 2, "--relation", "vertex")
    assert code == 0 and json.loads(out)["margin"] >= 0
    code, out, _ = run_cli(capsys, "spectral", "conductance", "--graph", g)
    assert code == 0


def test_cli_subdiv_find_and_verify_hypercube_fails(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "gen", "hypercube", "--k", 3)
    path = tmp_path / "q3.txt"
    path.write_text(out)
    code, _, err = run_cli(capsys, "subdiv", "find", "--graph", path)
    assert code == 1
    assert "NoCliqueOfGoodPairs" in err or "RoundsExhausted" in err


def test_cli_subdiv_find_verify_round_trip(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "gen", "gnp", "--n", 200, "--p", 0.6, "--colour", "--seed", 1)
    assert code == 0
    path = tmp_path / "g.txt"
    path.write_text(out)
    cert = tmp_path / "cert.json"
    code, _, _ = run_cli(capsys, "subdiv", "find", "--graph", path, "--json-out", cert, "--seed", 0)
    assert code == 0
    code, out, _ = run_cli(capsys, "subdiv", "verify", "--graph", path, "--cert", cert)
    assert code == 0 and json.loads(out)["ok"]
    bad = json.loads(cert.read_text())
    first = bad["paths"][0]
    first["vertices"] = first["vertices"][:1] + first["vertices"][-1:]
    cert.write_text(json.dumps(bad))
    code, out, _ = run_cli(capsys, "subdiv", "verify", "--graph", path, "--cert", cert)
    assert code == 1


def test_cli_run(capsys, tmp_path):
    spec = tmp_path / "cube.toml"
    spec.write_text(HYPERCUBE_SPEC)
    code, out, _ = run_cli(capsys, "run", "--spec", spec, "--out", tmp_path / "o")
    assert code == 0
    payload = json.loads(out)
    assert payload["successes"] == 0
    assert (tmp_path / "o" / "summary.json").exists()
