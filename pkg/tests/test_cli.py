import json

import pytest

from pmsearch.attack import AttackInstance, SurrogateVictim, instance_to_dict
from pmsearch.cli import main


@pytest.fixture
def toy_file(tmp_path):
    inst = AttackInstance(("I", "love", "this", "movie"),
                          ((), ("like", "favor"), (), ("film", "picture")), true_label=1)
    victim = SurrogateVictim({(1, "love"): 1.0, (1, "favor"): -1.0}, bias=0.2)
    path = tmp_path / "toy.json"
    path.write_text(json.dumps(instance_to_dict(inst, victim)))
    return path


@pytest.fixture
def immune_file(tmp_path):
    inst = AttackInstance(("a", "b"), (("c",), ()), true_label=1)
    path = tmp_path / "immune.json"
    path.write_text(json.dumps(instance_to_dict(inst, SurrogateVictim({}, bias=1.0))))
    return path


def test_solve_prints_the_adversarial_sentence(toy_file, capsys):
    assert main(["solve", str(toy_file), "--alg", "ls"]) == 0
    out = capsys.readouterr().out
    assert "tokens: I favor this movie" in out
    assert "success: true" in out


def test_failed_attack_exits_2(immune_file, capsys):
    assert main(["solve", str(immune_file)]) == 2
    assert "termination: local-optimum" in capsys.readouterr().out


def test_malformed_file_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    assert main(["solve", str(bad)]) == 1
    assert "line 1" in capsys.readouterr().err


def test_missing_file_exits_1(tmp_path):
    assert main(["solve", str(tmp_path / "nope.json")]) == 1


def test_bad_flag_exits_1(toy_file):
    assert main(["solve", str(toy_file), "--alg", "annealing"]) == 1


def test_pso_is_deterministic(toy_file, capsys):
    main(["solve", str(toy_file), "--alg", "pso", "--seed", "7"])
    first = capsys.readouterr().out
    main(["solve", str(toy_file), "--alg", "pso", "--seed", "7"])
    assert capsys.readouterr().out == first


def test_gen_then_bench(tmp_path, capsys):
    corpus = tmp_path / "corpus.json"
    assert main(["gen", "--instances", "3", "--max-tokens", "20", "--seed", "4",
                 "--out", str(corpus)]) == 0
    report = tmp_path / "report.csv"
    records = tmp_path / "runs.csv"
    assert main(["bench", "--corpus", str(corpus), "--alg", "ls,pso", "--repeats", "2",
                 "--iters", "3", "--out", str(report), "--records", str(records)]) == 0
    lines = report.read_text().splitlines()
    assert lines[0].startswith("algorithm,runs,")
    assert [l.split(",")[0] for l in lines[1:]] == ["ls", "pso"]
    assert len(records.read_text().splitlines()) == 1 + 3 * (1 + 2)
    assert "fingerprint" in capsys.readouterr().out


def test_bench_from_generator_flags_matches_jobs(tmp_path):
    outs = []
    for jobs in ("1", "2"):
        path = tmp_path / f"r{jobs}.csv"
        main(["bench", "--instances", "4", "--max-tokens", "20", "--alg", "ls,ga",
              "--repeats", "2", "--iters", "3", "--jobs", jobs, "--out", str(path)])
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_bench_rejects_unknown_algorithm():
    assert main(["bench", "--alg", "ls,sa", "--instances", "1"]) == 1


def test_verify_figure2(tmp_path, capsys):
    out = tmp_path / "grid.csv"
    assert main(["verify", "figure2", "--out", str(out)]) == 0
    assert out.read_text().startswith("alpha,d,")
    assert "figure2: ok" in capsys.readouterr().out


def test_verify_bounds_count(capsys):
    assert main(["verify", "bounds", "--count", "10"]) == 0
    assert "10/10" in capsys.readouterr().out
