"""Quick end-to-end check of the qbch_py extension module."""

import json

import qbch_py as q


def main():
    steane = q.Code.bch(7, 3)
    assert (steane.n, steane.k, steane.d) == (7, 1, 3), steane
    assert q.Code.from_json(steane.to_json()).k == 1

    code = q.Code.bch(31, 5)
    assert (code.n, code.k) == (31, 11)
    assert len(q.automorphisms(31, 5)) == 155
    assert all(code.is_automorphism(e) for e in ["R^3", "F^2", "R^7 F"])

    try:
        q.Code.bch(31, 11)
    except ValueError as e:
        assert "dual-containing" in str(e)
    else:
        raise AssertionError("expected an error for a non dual-containing code")

    circ = q.Circuit.synth(code)
    assert circ.n_qubits == 31 and circ.cnot_count > 0
    assert q.Circuit.parse(circ.serialize()).cnot_count == circ.cnot_count

    conventional = q.Protocol(steane, (2, 2))
    assert conventional.verify()["pass"]
    negative = q.Protocol(code, (2, 2))
    verdict = negative.verify(stop_at_first=True)
    assert not verdict["pass"] and verdict["malignant"]
    good = q.Protocol(code, (2, 2), perms=[["I", "R^14"], ["R^28", "R^17 F^4"]])
    assert good.verify()["pass"]
    restored = q.Protocol.from_json(code, good.to_json())
    assert restored.num_blocks == 4

    rows = conventional.simulate([0.0, 1e-3], shots=20000, seed=3)
    assert rows[0]["acc1"] == 1.0 and rows[0]["x_w1"] == 0.0
    assert rows == conventional.simulate([0.0, 1e-3], shots=20000, seed=3)

    report = q.search_permutations(steane, (2, 2), generators=["I", "R"], budget=4)
    assert report["candidates_checked"] == 4

    assert q.effective_rates(2, 3) == ("4/5", "4/15")
    g, digits = q.gamma("0", "0", 1, c1="0")
    assert digits.startswith("1.41421356237309504880")
    assert q.leading_coefficient(steane) == "42"
    p0, p0_circ = q.scaling_threshold("42", 1, "8/15", "8/15")
    assert abs(p0 - 1 / 42) < 1e-15 and p0_circ < p0

    table = q.threshold_table(m_max=5)
    assert any(r["code"] == "[[31,11,5]]" for r in table)
    print(json.dumps({"codes": len({r["code"] for r in table}), "steane_p0": p0}))
    print("smoke test passed")


if __name__ == "__main__":
    main()
