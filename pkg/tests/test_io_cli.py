import json
import subprocess
import sys

import pytest

from mbk import io
from mbk.bases import minimal_basis
from mbk.chordal import CliqueTree
from mbk.cli import main
from mbk.core import Table, compute_b


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def ci3_file(tmp_path):
    return _write(tmp_path / "model.json", {"levels": [2, 2, 2], "facets": [[0], [1], [2]]})


def test_round_trips(ci3):
    assert io.model_from_json(io.model_to_json(ci3)) == ci3
    t = Table.from_cells([(0, 1, 1), (1, 0, 0), (1, 0, 0)])
    assert io.table_from_json(io.table_to_json(t), ci3) == t
    b = compute_b(t, ci3)
    assert io.margins_from_json(io.margins_to_json(b), ci3) == b
    assert io.margins_from_json(io.table_to_json(t), ci3) == b
    moves = minimal_basis(ci3).moves
    assert io.moves_from_json(json.loads(io.dumps(io.moves_to_json(moves)))) == list(moves)
    tree = CliqueTree([(0,), (1,), (2,)], [(0, 1), (1, 2)])
    back = io.tree_from_json(io.tree_to_json(tree))
    assert back.cliques == tree.cliques and back.edges == tree.edges


def test_format_errors(ci3):
    with pytest.raises(io.FormatError):
        io.model_from_json({"levels": [2]})
    with pytest.raises(io.FormatError):
        io.table_from_json({"cells": [[0, 1]]})
    with pytest.raises(io.FormatError):
        io.moves_from_json({"pos": []})
    with pytest.raises(io.FormatError):
        io.margins_from_json({"margins": []}, ci3)


def test_analyze(ci3_file, tmp_path, capsys):
    dot = tmp_path / "tree.dot"
    assert main(["analyze", "--model", ci3_file, "--dot", str(dot)]) == 0
    out = capsys.readouterr().out
    assert "decomposable: yes" in out and "minimal basis: non-unique" in out
    assert "clique trees: 3" in out
    assert dot.read_text().startswith("graph")


def test_analyze_non_chordal(tmp_path, capsys):
    path = _write(tmp_path / "c4.json", {"levels": [2] * 4, "facets": [[0, 1], [1, 2], [2, 3], [0, 3]]})
    assert main(["analyze", "--model", path]) == 0
    assert "chordal: no" in capsys.readouterr().out


def test_fibers(ci3_file, tmp_path, capsys):
    assert main(["fibers", "--model", ci3_file]) == 0
    assert "fibers: 7" in capsys.readouterr().out
    assert main(["fibers", "--model", ci3_file, "--representative", "--members"]) == 0
    out = capsys.readouterr().out
    assert "fibers: 4" in out and "Table((000)(111))" in out
    b = _write(tmp_path / "t.json", {"cells": [[[0, 0, 0], 1], [[1, 1, 1], 1]]})
    assert main(["fibers", "--model", ci3_file, "--b", b]) == 0
    assert out.count("size=4") >= 1 and "Table((011)(100))" in capsys.readouterr().out


def test_basis_pipeline(ci3_file, tmp_path, capsys):
    moves = tmp_path / "moves.json"
    assert main(["min-basis", "--model", ci3_file, "--policy", "random", "--seed", "3", "--out", str(moves)]) == 0
    assert "minimal-random: 9 moves" in capsys.readouterr().out
    assert len(json.loads(moves.read_text())) == 9
    assert main(["verify", "--model", ci3_file, "--moves", str(moves), "--degree-cap", "3"]) == 0
    assert capsys.readouterr().out.startswith("PASS")
    # dropping a move breaks connectivity
    data = json.loads(moves.read_text())[1:]
    short = _write(tmp_path / "short.json", data)
    assert main(["verify", "--model", ci3_file, "--moves", short]) == 1
    assert "FAIL" in capsys.readouterr().out
    table = _write(tmp_path / "t.json", {"cells": [[[0, 0, 0], 2], [[1, 1, 1], 1], [[0, 1, 0], 1]]})
    assert main(["exact-test", "--model", ci3_file, "--table", table, "--basis", str(moves),
                 "--steps", "2000", "--burnin", "100"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert 0 <= res["p_value"] <= 1 and res["samples"] == 1900


def test_dobra_invariant_groebner(ci3_file, tmp_path, capsys):
    tree = _write(tmp_path / "tree.json", {"cliques": [[0], [1], [2]], "edges": [[0, 1], [1, 2]]})
    out = tmp_path / "d.json"
    assert main(["dobra", "--model", ci3_file, "--tree", tree, "--out", str(out)]) == 0
    assert "some clique tree gives a minimal basis: no" in capsys.readouterr().out
    inv = tmp_path / "inv.json"
    assert main(["invariant-basis", "--model", ci3_file, "--representatives", "--out", str(inv)]) == 0
    assert "orbits: 5" in capsys.readouterr().out
    assert sorted({m["orbit"] for m in json.loads(inv.read_text())}) == [0, 1, 2, 3, 4]
    assert main(["groebner", "--model", ci3_file, "--verify-cap", "3"]) == 0
    text = capsys.readouterr().out
    assert "normal forms up to degree 3: PASS" in text and "reduced: PASS" in text


def test_check_unique(ci3_file, tmp_path, capsys):
    assert main(["check-unique", "--model", ci3_file]) == 0
    assert "non-unique: variables 1, 2, 3" in capsys.readouterr().out
    chain = _write(tmp_path / "chain.json", {"levels": [2, 2, 2], "facets": [[0, 1], [1, 2]]})
    assert main(["check-unique", "--model", chain]) == 0
    assert capsys.readouterr().out.strip() == "unique"


def test_errors(tmp_path, capsys):
    assert main(["analyze", "--model", str(tmp_path / "missing.json")]) == 2
    assert "cannot read" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["analyze", "--model", str(bad)]) == 2
    nested = _write(tmp_path / "nested.json", {"levels": [2, 2], "facets": [[0, 1], [0]]})
    assert main(["analyze", "--model", nested]) == 1
    assert "ModelError" in capsys.readouterr().err
    tri = _write(tmp_path / "tri.json", {"levels": [2, 2, 2], "facets": [[0, 1], [1, 2], [0, 2]]})
    assert main(["groebner", "--model", tri]) == 1
    assert "NotDecomposable" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["no-such-command"])


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "mbk", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "min-basis" in res.stdout and '"levels"' in res.stdout
