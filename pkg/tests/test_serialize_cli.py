import json

import pytest
from hypothesis import given, settings, strategies as st

from gampkit import build_named, build_square
from gampkit.cli import run
from gampkit.congruence import conc
from gampkit.diagram import apply_functor
from gampkit.errors import SchemaError
from gampkit.gamp import ga
from gampkit.poset import FinitePoset
from gampkit.pregamp import pga
from gampkit.semilattice import JoinSemilattice
from gampkit import serialize as ser


class TestRoundTrips:
    def test_semilattice(self):
        s = JoinSemilattice.product(JoinSemilattice.chain(2), JoinSemilattice.chain(3))
        data = ser.semilattice_to_json(s)
        back = ser.semilattice_from_json(json.loads(json.dumps(data)))
        assert back == s

    def test_algebra(self, m3):
        data = ser.algebra_to_json(m3)
        assert ser.algebra_from_json(json.loads(json.dumps(data))) == m3

    def test_partial_algebra(self):
        from gampkit.palg import LATTICE_TYPE, PartialAlgebra

        alg = PartialAlgebra(LATTICE_TYPE, ["a", "b"], {"meet": {("a", "b"): "a"}})
        assert ser.algebra_from_json(ser.algebra_to_json(alg)) == alg

    def test_named_shorthand(self, m3):
        assert ser.algebra_from_json({"named": "M3"}) == m3
        assert ser.algebra_from_json("M3") == m3

    def test_poset(self):
        p = FinitePoset.square()
        assert ser.poset_from_json(ser.poset_to_json(p)) == p

    def test_pregamp(self, chain3):
        pg = pga(chain3)
        back = ser.pregamp_from_json(json.loads(json.dumps(ser.pregamp_to_json(pg))))
        assert back == pg

    def test_gamp(self, x1):
        g = ga(x1)
        back = ser.gamp_from_json(json.loads(json.dumps(ser.gamp_to_json(g))))
        assert back.inner == g.inner and back.pregamp == g.pregamp

    def test_diagram(self):
        sq = build_square("M3", 2)
        d = apply_functor(sq.a_square, "GA")
        data = ser.diagram_to_json(d)
        back = ser.diagram_from_json(json.loads(json.dumps(data)))
        for p in d.poset.elements:
            assert back.objects[p].pregamp == d.objects[p].pregamp

    def test_unknown_major_rejected(self):
        with pytest.raises(SchemaError):
            ser.semilattice_from_json({"schema": "otherkit/1", "elements": [], "zero": 0, "join": []})

    def test_missing_reference_reported(self, chain3):
        pg = pga(chain3)
        data = ser.pregamp_to_json(pg)
        data["dist"][0][2] = {"congruence": [["9"]]}
        with pytest.raises(SchemaError) as exc:
            ser.pregamp_from_json(data)
        assert "not in semilattice" in str(exc.value)


class TestDot:
    def test_two_chain(self):
        dot = ser.export_dot(FinitePoset.chain(2))
        assert dot.count("->") == 1

    def test_m3_hasse(self, m3):
        dot = ser.export_dot(m3)
        assert dot.count("->") == 6
        assert len([l for l in dot.splitlines() if l.endswith(";") and "->" not in l]) == 5 + 1

    def test_square_shape(self):
        sq = build_square("M3", 2)
        dot = ser.export_dot(apply_functor(sq.a_square, "GA"))
        assert dot.count("->") == 4


class TestCli:
    def write(self, tmp_path, name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    def test_conc_m3(self, tmp_path, m3, capsys):
        path = self.write(tmp_path, "m3.json", ser.algebra_to_json(m3))
        code = run(["conc", path])
        out = json.loads(capsys.readouterr().out)
        assert code == 0
        assert len(out["elements"]) == 2

    def test_permutable_exit_codes(self, tmp_path, capsys):
        path = self.write(tmp_path, "c3.json", {"named": "chain:3"})
        assert run(["permutable", "--n", "2", path]) == 1
        capsys.readouterr()
        assert run(["permutable", "--n", "3", path]) == 0

    def test_quotient_semilattice(self, tmp_path, capsys):
        s = JoinSemilattice.chain(3)
        path = self.write(tmp_path, "s.json", ser.semilattice_to_json(s))
        assert run(["quotient", path, "--ideal", "1"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert len(out["elements"]) == 2

    def test_gamp_check(self, tmp_path, x1, capsys):
        path = self.write(tmp_path, "g.json", ser.gamp_to_json(ga(x1)))
        assert run(["gamp-check", path, "--property", "strong"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["status"] == "true"
        assert run(["gamp-check", path, "--property", "lattice_n_permutable", "--n", "3"]) == 0

    def test_diagram_verify_operational(self, tmp_path, capsys):
        sq = build_square("M3", 2)
        d = apply_functor(sq.a_square, "GA")
        path = self.write(tmp_path, "d.json", ser.diagram_to_json(d))
        assert run(["diagram-verify", path, "--kind", "operational"]) == 0

    def test_diagram_verify_partial_lifting(self, tmp_path, capsys):
        sq = build_square("M3", 2)
        d = apply_functor(sq.a_square, "GA")
        data = ser.diagram_to_json(d)
        data["realizations"] = {}
        for p in d.poset.elements:
            g = d.objects[p]
            data["realizations"][str(p)] = {
                "ambient": ser.algebra_to_json(sq.a_square.objects[p]),
                "chi": [[ser.encode_el(a), ser.encode_el(a)] for a in g.sem.elements],
            }
        path = self.write(tmp_path, "d.json", data)
        assert run(["diagram-verify", path, "--kind", "partial-lifting", "--x-cap", "2"]) == 0

    def test_poset_commands(self, tmp_path, capsys):
        assert run(["poset", "--bm", "3"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert len(out["elements"]) == 8
        spec = {
            "base": ser.poset_to_json(FinitePoset.chain(2)),
            "marks": [1],
            "branch": [[1, ["r"]]],
            "depth": 2,
        }
        path = self.write(tmp_path, "spec.json", spec)
        assert run(["poset", "--kposet", path, "--check-covers"]) == 0

    def test_buttress_cli(self, tmp_path, capsys):
        apath = self.write(tmp_path, "a.json", {"named": "M3"})
        ppath = self.write(tmp_path, "p.json", ser.poset_to_json(FinitePoset.chain(2)))
        assert run([
            "buttress", "--algebra", apath, "--poset", ppath,
            "--ideal", "0=0/x1",
        ]) == 0

    def test_repro_unliftable(self, capsys):
        assert run(["repro", "unliftable", "--K", "M3", "--n", "2"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["facts"]["ok"]

    def test_malformed_json_exit_3(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert run(["conc", str(path)]) == 3

    def test_dot_output(self, tmp_path, m3, capsys):
        path = self.write(tmp_path, "m3.json", ser.algebra_to_json(m3))
        assert run(["conc", path, "--format", "dot"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("digraph")

    def test_deterministic_reports(self, tmp_path, m3, capsys):
        path = self.write(tmp_path, "m3.json", ser.algebra_to_json(m3))
        run(["conc", path])
        first = capsys.readouterr().out
        run(["conc", path])
        second = capsys.readouterr().out
        assert first == second


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4))
def test_semilattice_roundtrip_property(a, b):
    s = JoinSemilattice.product(JoinSemilattice.chain(a), JoinSemilattice.chain(b))
    data = json.loads(json.dumps(ser.semilattice_to_json(s)))
    assert ser.semilattice_from_json(data) == s


class TestWitnessMode:
    def write(self, tmp_path, name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    def test_found(self, tmp_path, capsys):
        path = self.write(tmp_path, "c3.json", {"named": "chain:3"})
        assert run(["permutable", path, "--witness", "0/2", "--pairs", "0/1,1/2"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["found"] and out["steps"] >= 1

    def test_no_containment(self, tmp_path, capsys):
        path = self.write(tmp_path, "c3.json", {"named": "chain:3"})
        assert run(["permutable", path, "--witness", "0/2", "--pairs", "0/1"]) == 1

    def test_unknown_at_bound(self, tmp_path, capsys):
        path = self.write(tmp_path, "m3.json", {"named": "M3"})
        code = run([
            "permutable", path, "--witness", "x2/x3", "--pairs", "0/x1",
            "--depth-bound", "0",
        ])
        assert code == 2


def test_worker_pool_contract(monkeypatch):
    from gampkit.util import pmap, worker_count

    monkeypatch.setenv("GAMPKIT_THREADS", "3")
    assert worker_count() == 3
    assert pmap(lambda x: x * x, range(6)) == [0, 1, 4, 9, 16, 25]
    monkeypatch.setenv("GAMPKIT_THREADS", "junk")
    assert worker_count() == 1


class TestQuotientBundles:
    def write(self, tmp_path, name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    def test_pregamp_quotient_by_index(self, tmp_path, x1, capsys):
        path = self.write(tmp_path, "pg.json", ser.pregamp_to_json(pga(x1)))
        assert run(["quotient", path, "--ideal", "#1"]) == 0
        out = json.loads(capsys.readouterr().out)
        back = ser.pregamp_from_json(out)
        assert len(back.carrier) < len(x1.universe)

    def test_gamp_quotient_by_index(self, tmp_path, x1, capsys):
        path = self.write(tmp_path, "g.json", ser.gamp_to_json(ga(x1)))
        assert run(["quotient", path, "--ideal", "#1"]) == 0
        out = json.loads(capsys.readouterr().out)
        back = ser.gamp_from_json(out)
        assert len(back.outer) < len(x1.universe)

    def test_bad_token_exit_3(self, tmp_path, capsys):
        s = JoinSemilattice.chain(3)
        path = self.write(tmp_path, "s.json", ser.semilattice_to_json(s))
        assert run(["quotient", path, "--ideal", "nope"]) == 3

    def test_conc_too_large_exit_3(self, tmp_path, capsys):
        path = self.write(tmp_path, "m3.json", {"named": "M3"})
        assert run(["conc", path, "--bound", "2"]) == 3


def test_repro_dot_shapes(capsys):
    assert run(["repro", "unliftable", "--K", "M3", "--n", "2", "--format", "dot"]) == 0
    out = capsys.readouterr().out
    assert out.count("digraph") == 2 and out.count("->") == 8
