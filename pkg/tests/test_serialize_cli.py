import io
import json
from fractions import Fraction
from pathlib import Path

import pytest

from torusheight import serialize as ser
from torusheight.cli import run_command
from torusheight.lattice import Sublattice
from torusheight.torus import TorusTranslate

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def inst(name):
    return INSTANCES / name


class TestParse:
    def test_minimal_torus(self):
        i = ser.parse_instance('{"kind": "torus", "ambient": 2, "gamma_basis": [["3", "-2"]]}')
        assert isinstance(i.payload, TorusTranslate) and i.payload.gamma == Sublattice.span([[3, -2]])

    def test_bad_rational(self):
        with pytest.raises(ser.InstanceError) as e:
            ser.parse_instance(inst("bad-rational.json").read_text())
        assert e.value.path == "$.coordinates[0]" and "zero denominator" in str(e.value)

    def test_unknown_kind(self):
        with pytest.raises(ser.InstanceError) as e:
            ser.parse_instance(inst("bad-kind.json").read_text())
        assert e.value.path == "$.kind"
        assert all(k in str(e.value) for k in ser.KINDS)

    @pytest.mark.parametrize("text, path", [
        ("not json", "$"),
        ('{"kind": "torus", "ambient": "2", "gamma_basis": [["1.5", "0"]]}', "$.gamma_basis[0][0]"),
        ('{"kind": "torus", "ambient": 2, "gamma_basis": [["2", "0"]]}', "$.gamma_basis"),
        ('{"kind": "point", "coordinates": [true, "1"]}', "$.coordinates[0]"),
        ('{"kind": "hyperform", "N": 1, "form": "__import__(\'os\')"}', "$.form"),
    ])
    def test_errors_carry_paths(self, text, path):
        with pytest.raises(ser.InstanceError) as e:
            ser.parse_instance(text)
        assert e.value.path == path

    def test_valueless_generators_need_assertion(self):
        text = json.dumps({"kind": "torus", "ambient": 1, "gamma_basis": [["1"]],
                           "generators": [{"label": "g"}], "exponent_matrix": [["1"]]})
        with pytest.raises(ser.InstanceError):
            ser.parse_instance(text)
        obj = json.loads(text)
        obj["independence_asserted"] = True
        assert ser.parse_instance(json.dumps(obj)).payload.point.conditional

    def test_dependent_values_rejected(self):
        text = json.dumps({"kind": "torus", "ambient": 1, "gamma_basis": [["1"]],
                           "generators": [{"label": "a", "value": "2"}, {"label": "b", "value": "4"}],
                           "exponent_matrix": [["1", "0"]]})
        with pytest.raises(ser.InstanceError):
            ser.parse_instance(text)

    def test_torus_round_trip(self):
        X = ser.parse_instance(inst("point-4-8-presented.json").read_text()).payload
        again = ser.parse_instance(ser.dumps({"kind": "torus", **ser.torus_to_dict(X)})).payload
        assert again == X

    def test_polynomial(self):
        assert ser.parse_polynomial("x**2 - x - 1") == [1, -1, -1]
        with pytest.raises(ser.InstanceError):
            ser.parse_polynomial("x**2 - y")
        with pytest.raises(ser.InstanceError):
            ser.parse_polynomial("x**0.5")

    def test_precision_and_seed(self):
        i = ser.parse_instance('{"kind": "point", "coordinates": ["2"], "seed": 7, "precision": 200}')
        assert (i.seed, i.prec) == (7, 200)
        with pytest.raises(ser.InstanceError):
            ser.parse_instance('{"kind": "point", "coordinates": ["2"], "precision": 3}')

    def test_rationals_and_matrices_as_strings(self):
        assert ser.rational(Fraction(-3, 6)) == "-1/2"
        assert ser.int_matrix([(10**30, -1)]) == [[str(10**30), "-1"]]


class TestCommands:
    def test_closure(self):
        code, out, err = run("torus", "closure", inst("point-4-8.json"))
        d = json.loads(out)
        assert code == 0 and not err
        assert d["gamma_u_basis"] == [["3", "-2"]] and d["degree"] == 3 and d["subtorus"]

    def test_degree(self):
        code, out, _ = run("torus", "degree", inst("line-in-plane.json"))
        assert code == 0 and json.loads(out)["degree"] == 1

    def test_headline_bound(self):
        code, out, _ = run("bound", "thm13", inst("point-4-8.json"), "--m-k", "log2")
        d = json.loads(out)
        assert code == 0 and d["holds_all"]
        assert abs(d["bounds"]["headline"]["decimal"] - 0.980258) < 1e-6
        assert d["bounds"]["actual_height"]["exact"] == "log(8)"

    def test_codimension_bound_from_query(self):
        code, out, _ = run("bound", "cor15", inst("bound-query.json"))
        assert code == 0 and abs(json.loads(out)["bounds"]["printed"]["decimal"] - 0.12997) < 1e-5

    def test_obstruct_self_is_infinite(self):
        code, out, _ = run("torus", "obstruct", inst("self.json"), inst("self.json"))
        d = json.loads(out)
        assert code == 2 and d["omega"] is None and d["infinite"]

    def test_obstruct_point_in_plane(self):
        code, out, _ = run("torus", "obstruct", inst("point-4-8.json"))
        assert code == 0 and json.loads(out)["omega"] == 1

    def test_obstruct_not_contained(self):
        code, out, err = run("torus", "obstruct", inst("point-4-8.json"), inst("line-in-plane.json"))
        assert code == 1 and out == "" and json.loads(err)["error"]

    def test_mahler(self):
        code, out, _ = run("height", "mahler", "x**2 - x - 1")
        d = json.loads(out)
        assert code == 0 and not d["is_root_of_unity"]
        assert abs(d["height"]["decimal"] - 0.2406059125298) < 1e-12

    def test_point_height(self):
        code, out, _ = run("height", "point", inst("point-4-8.json"))
        assert code == 0 and json.loads(out)["height"]["exact"] == "log(8)"

    def test_ff(self):
        code, out, _ = run("ff", "height", inst("ff-point.json"))
        assert code == 0 and json.loads(out)["height"] == 2
        code, out, _ = run("ff", "closure", inst("ff-point.json"))
        assert code == 0
        code, out, _ = run("ff", "verify", inst("ff-point.json"), "--samples", "4")
        assert code == 0 and all(json.loads(out)["holds"].values())

    def test_ff_vacuous(self):
        code, out, _ = run("ff", "verify", inst("ff-constant.json"))
        assert code == 2 and json.loads(out)["vacuous"]

    def test_hyperform(self):
        code, out, _ = run("ff", "verify", inst("plane-curve.json"), "--samples", "3")
        d = json.loads(out)
        assert code == 0 and (d["h"], d["deg"]) == (1, 2) and d["essmin_sample"]["holds"]

    def test_verify_small(self):
        code, out, _ = run("verify", "all", "--sizes", "2..3", "--instances", "4",
                           "--only", "saturate_idempotent,product_formula")
        d = json.loads(out)
        assert code == 0 and d["passed"] and not d["failures"]

    @pytest.mark.parametrize("argv", [
        ("torus", "closure", "missing.json"),
        ("torus", "closure", str(INSTANCES / "bad-rational.json")),
        ("torus", "closure", str(INSTANCES / "bad-kind.json")),
        ("ff", "height", str(INSTANCES / "point-4-8.json")),
        ("bound", "thm13", str(INSTANCES / "point-4-8.json"), "--m-k", "nonsense"),
        ("height", "mahler", "0"),
        ("height", "mahler", "x - 2", "--tol", "-1"),
        ("verify", "all", "--sizes", "5..2"),
        ("verify", "all", "--only", "no_such_property"),
        ("torus", "degree", str(INSTANCES / "point-4-8.json"), "--prec", "4"),
    ])
    def test_errors_exit_one_without_stdout(self, argv):
        code, out, err = run(*argv)
        assert code == 1 and out == ""
        if err.startswith("{"):
            assert "error" in json.loads(err)

    def test_usage_error(self):
        code, out, _ = run("torus")
        assert code == 1 and out == ""

    @pytest.mark.parametrize("argv", [
        ("bound", "thm13", str(INSTANCES / "point-4-8.json")),
        ("ff", "verify", str(INSTANCES / "ff-point.json"), "--seed", "3"),
        ("verify", "all", "--sizes", "2..2", "--instances", "3", "--only", "kronecker,mixed_volume_symmetric"),
    ])
    def test_deterministic_output(self, argv):
        assert run(*argv)[1] == run(*argv)[1]
