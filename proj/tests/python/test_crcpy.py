import cmath

import pytest

import crcpy


def test_version_and_schema():
    assert crcpy.__version__ == "0.1.0"
    assert crcpy.SCHEMA_VERSION == "1"


def test_expression_utilities():
    assert crcpy.diff("t1^2/t2", "t1") == crcpy.canonical("2*t1/t2")
    assert crcpy.conjugate("b*lam", {"b": "complex:bb", "lam": "imaginary"}) == crcpy.canonical(
        "-bb*lam", {"b": "complex:bb", "lam": "imaginary"}
    )
    v = crcpy.evaluate("(1-12*t1*t2)^(1/2)", {"t1": 0.05, "t2": 0.05})
    assert cmath.isclose(v, 0.97 ** 0.5, rel_tol=1e-14)


def test_zero_test_verdicts():
    box = "t1=0.1:1,t2=0.1:1"
    assert crcpy.zero_test("(t1+t2)^2 - t1^2 - 2*t1*t2 - t2^2", box)["verdict"] == "zero"
    assert crcpy.zero_test("t1 - t2", box)["verdict"] == "nonzero"
    assert crcpy.zero_test("(t1-5)^(1/2)", "t1=0.1:1")["verdict"] == "inconclusive"


def test_errors():
    with pytest.raises(crcpy.ParseError):
        crcpy.canonical("t1 +")
    with pytest.raises(crcpy.Error):
        crcpy.dga_verify("nope")
    with pytest.raises(ValueError):
        crcpy.canonical("x", {"x": "quaternion"})


def test_model_and_dga_reports():
    r = crcpy.model_verify()
    assert r["schema"] == "1" and r["status"] == "pass"
    assert all("seconds" not in c for c in r["checks"])
    assert crcpy.dga_verify("shifts")["status"] == "pass"
    cartan = crcpy.dga_verify("cartan")
    failing = [c["name"] for c in cartan["checks"] if c["status"] != "pass"]
    assert failing == ["necessity: Phi1hat_11b (printed)"]


def test_tube_reports():
    ex = crcpy.tube_paper_example()
    assert ex["status"] == "pass"
    assert ex["result"]["verdict"]["flatness"] == "not_flat"
    deg = crcpy.tube_analyze("t1^2/2", box="t1=0.1:1,t2=0.1:1")
    assert deg["status"] == "fail"
    assert deg["result"]["reason"] == "2-nondegeneracy: S ≡ 0"
    assert crcpy.tube_profile("s^4")["status"] == "pass"
    assert crcpy.tube_paper_example(seed=3) == crcpy.tube_paper_example(seed=3)
