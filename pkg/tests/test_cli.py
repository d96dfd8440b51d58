import json
from pathlib import Path

import pytest

from uslsq.algebra import bose_mols
from uslsq.cli import main
from uslsq.isomorph import aut_order, design_certificate, sls_certificate
from uslsq.sls_core import SemiLatinSquare, dual, from_latin, underlying_design

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
EQ1 = str(FIXTURES / "eq1_3x3_4.json")

SCHEMA = json.loads(
    (Path(__file__).resolve().parent.parent / "src" / "uslsq" / "data"
     / "report.schema.json").read_text())


def check_report_shape(obj):
    # hand-rolled check against data/report.schema.json
    assert isinstance(obj, dict)
    assert set(SCHEMA["required"]) <= set(obj)
    assert not (set(obj) - set(SCHEMA["properties"]))
    assert isinstance(obj["command"], str)
    assert isinstance(obj["ok"], bool)
    assert isinstance(obj["result"], dict)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    report = json.loads(out)
    check_report_shape(report)
    return code, report, err


def load_eq1() -> SemiLatinSquare:
    return SemiLatinSquare.from_json(Path(EQ1).read_text())


def test_field_command(capsys):
    code, report, _ = run_json(capsys, "field", "4")
    assert code == 0 and report["ok"]
    add = report["result"]["add"]
    assert add[0] == [0, 1, 2, 3]
    assert all(add[i][i] == 0 for i in range(4))  # characteristic 2


def test_field_rejects_non_prime_power(capsys):
    code, out, err = run(capsys, "field", "6")
    assert code == 2 and out == "" and "6" in err


def test_mols_command(capsys):
    code, report, _ = run_json(capsys, "mols", "5")
    assert code == 0 and report["ok"]
    assert report["result"]["count"] == 4
    assert report["result"]["pairwise_orthogonal"] is True
    code, _, err = run(capsys, "mols", "10")
    assert code == 2 and "10" in err


def test_construct_chain_reproduces_the_small_fixture(capsys, tmp_path):
    latins = [from_latin(sq) for sq in bose_mols(3)]
    paths = []
    for i, sq in enumerate(latins):
        p = tmp_path / f"latin{i}.json"
        p.write_text(sq.to_json())
        paths.append(str(p))

    code, out, _ = run(capsys, "construct", "superpose", "--inputs", *paths)
    assert code == 0
    sup = tmp_path / "sup.json"
    sup.write_text(out)

    code, out, _ = run(capsys, "construct", "inflate", "--input", str(sup),
                       "--factor", "2")
    assert code == 0
    inflated = tmp_path / "inflated.json"
    inflated.write_text(out)
    assert json.loads(out)["k"] == 4

    code, out, _ = run(capsys, "iso", str(inflated), EQ1)
    assert code == 0 and "isomorphic: True" in out


def test_construct_bars(capsys):
    code, out, _ = run(capsys, "construct", "bars", "--n", "4")
    assert code == 0
    square = SemiLatinSquare.from_json(out)
    assert (square.n, square.k) == (5, 8)


def test_verify_uniform_square(capsys):
    code, out, _ = run(capsys, "verify", EQ1)
    assert code == 0
    assert "uniform with mu = 2" in out


def test_verify_non_uniform_square(capsys, tmp_path):
    latin = tmp_path / "latin.json"
    latin.write_text(from_latin(bose_mols(3)[0]).to_json())
    code, report, _ = run_json(capsys, "verify", str(latin))
    assert code == 1
    assert report["ok"] is False
    assert report["result"]["valid"] is True
    assert report["result"]["uniform"] is False
    witness = report["result"]["witness"]
    assert len(witness["cell1"]) == 2 and len(witness["cell2"]) == 2
    assert witness["intersection"] >= 0


def test_verify_structurally_broken_square(capsys, tmp_path):
    square = json.loads(Path(EQ1).read_text())
    square["cells"][0][0][0] = square["cells"][0][1][0]  # repeat in a row
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(square))
    code, report, _ = run_json(capsys, "verify", str(bad))
    assert code == 1
    assert report["result"]["valid"] is False
    assert report["result"]["errors"]


def test_verify_unreadable_input(capsys, tmp_path):
    garbled = tmp_path / "garbled.json"
    garbled.write_text("{nope")
    code, _, err = run(capsys, "verify", str(garbled))
    assert code == 1 or code == 2  # load error is reported, not raised
    code, _, err = run(capsys, "eta", str(garbled))
    assert code == 2 and "error" in err


def test_eta_command(capsys):
    code, report, _ = run_json(capsys, "eta", EQ1)
    assert code == 0
    assert report["result"]["eta"] == [24, 36, 0, 6]
    ids = report["result"]["identities"]
    assert ids["pair_total"] == ids["pairs_expected"]


def test_spectrum_command(capsys):
    code, out, _ = run(capsys, "spectrum", EQ1)
    assert code == 0
    assert "0.500000000 (x4)" in out
    assert "1.000000000 (x7)" in out


def test_dual_and_underlying_commands(capsys):
    code, report, _ = run_json(capsys, "dual", EQ1)
    assert code == 0
    assert report["result"]["v"] == 9
    assert len(report["result"]["blocks"]) == 12
    code, report, _ = run_json(capsys, "underlying", EQ1)
    assert code == 0
    assert report["result"]["v"] == 12
    assert len(report["result"]["blocks"]) == 9


def test_derive_and_oa_pipeline(capsys, tmp_path):
    code, out, _ = run(capsys, "derive", "d1", EQ1)
    assert code == 0
    d1 = tmp_path / "d1.json"
    d1.write_text(out)
    assert json.loads(out)["v"] == 18

    code, out, _ = run(capsys, "derive", "d3", EQ1)
    assert code == 0
    assert json.loads(out)["v"] == 9
    assert len(json.loads(out)["blocks"]) == 24

    code, out, _ = run(capsys, "to-oa", str(d1))
    assert code == 0
    assert out.splitlines()[0].split() == ["18", "3", "3"]
    oa = tmp_path / "oa.txt"
    oa.write_text(out)

    code, report, _ = run_json(capsys, "oa-strength", str(oa))
    assert code == 0
    assert report["result"]["strength"] == 2


def test_to_oa_rejects_non_affine(capsys, tmp_path):
    d = tmp_path / "underlying.json"
    d.write_text(underlying_design(load_eq1()).to_json())
    code, _, err = run(capsys, "to-oa", str(d))
    assert code == 2 and "error" in err


def test_resolve_command(capsys, tmp_path):
    d = tmp_path / "dual.json"
    d.write_text(dual(load_eq1()).to_json())
    code, report, _ = run_json(capsys, "resolve", str(d))
    assert code == 0
    assert report["result"]["resolvable"] is True
    classes = report["result"]["classes"]
    assert sorted(x for c in classes for x in c) == list(range(12))


def test_aut_and_cert_commands(capsys, tmp_path):
    eq1 = load_eq1()
    code, report, _ = run_json(capsys, "aut", EQ1)
    assert code == 0
    assert report["result"]["order"] == aut_order(eq1)

    code, out, _ = run(capsys, "cert", EQ1)
    assert code == 0
    assert out.strip() == sls_certificate(eq1).hex

    d = tmp_path / "dual.json"
    d.write_text(dual(eq1).to_json())
    code, out, _ = run(capsys, "cert", str(d))
    assert code == 0
    assert out.strip() == design_certificate(dual(eq1)).hex


def test_classify_and_catalog_commands(capsys, tmp_path):
    out_dir = str(tmp_path / "catalog41")
    code, report, _ = run_json(capsys, "classify", "--n", "4", "--mu", "1",
                               "--out", out_dir)
    assert code == 0
    assert report["result"]["class_count"] == 1
    assert report["result"]["complete"] is True

    code, out, _ = run(capsys, "catalog", out_dir)
    assert code == 0
    assert "1 classes" in out
    assert "|Aut|=576" in out

    code, _, err = run(capsys, "catalog", str(tmp_path / "missing"))
    assert code == 2 and "error" in err


def test_classify_shard_is_not_a_catalog(capsys, tmp_path):
    out_dir = str(tmp_path / "shard")
    code, report, _ = run_json(capsys, "classify", "--n", "4", "--mu", "1",
                               "--seed-range", "0..3", "--out", out_dir)
    assert code == 0
    assert report["result"]["complete"] is False
    code, _, err = run(capsys, "catalog", out_dir)
    assert code == 2 and "partial" in err


def test_classify_bad_seed_range(capsys):
    code, _, err = run(capsys, "classify", "--n", "4", "--mu", "1",
                       "--seed-range", "nope")
    assert code == 2 and "seed range" in err


def test_unknown_command_exits_with_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2
