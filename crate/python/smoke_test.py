"""Smoke test for the g2lab Python module."""

import json
import math
import random

import g2lab


def main():
    phi, psi = g2lab.Form.phi(), g2lab.Form.psi()
    assert phi.hodge() == psi
    assert phi.coeffs()["123"] == 1.0 and phi.coeffs()["257"] == -1.0
    assert abs(phi.wedge(psi).coeffs()["1234567"] - 7.0) < 1e-12
    assert abs(phi.norm_sq() - 7.0) < 1e-12

    rng = random.Random(3)
    for _ in range(50):
        vs = [[rng.uniform(-1, 1) for _ in range(7)] for _ in range(4)]
        p2, c2, gram = g2lab.hl_terms(vs)
        assert abs(p2 + c2 - gram) < 1e-12

    u = [1, 0, 0, 0, 0, 0, 0]
    v = [0, 1, 0, 0, 0, 0, 0]
    assert g2lab.cross(u, v) == [0, 0, 1, 0, 0, 0, 0]

    fibre = [[1.0 if i == j else 0.0 for i in range(7)] for j in range(3, 7)]
    psi_value, defect, c2 = g2lab.calibration_defect(fibre)
    assert psi_value == 1.0 and defect == 0.0 and c2 == 0.0

    a = g2lab.Form(7, 2, {"e12": 1.0, "e45": -2.0})
    p7, p14 = g2lab.project_lambda2(a)
    assert (p7 + p14 - a).max_abs() < 1e-12
    assert abs(p7.inner(p14)) < 1e-12

    ident = [[1.0 if i == j else 0.0 for i in range(7)] for j in range(7)]
    assert (g2lab.i_map(ident) - 6.0 * phi).max_abs() == 0.0

    report = json.loads(g2lab.verify(suites=["hl-identity", "b-formulas"], mode="exact", trials=20))
    assert report["schema"] == 1
    assert [c["status"] for c in report["checks"]] == ["pass", "pass"]

    algebras = g2lab.search(["0", "1", "-1"])
    assert len(algebras) > 1
    tau2, norm_sq, scal, residual = g2lab.check_structure_constants(algebras[-1])
    assert residual == 0.0 and norm_sq > 0
    assert math.isclose(scal, -0.5 * norm_sq)

    fv = json.loads(g2lab.first_variation("sphere", 16))
    assert fv["relative_mismatch"] < 1e-5

    try:
        g2lab.first_variation("helix")
    except ValueError as e:
        assert "affine-fiber" in str(e)
    else:
        raise AssertionError("unknown family accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
