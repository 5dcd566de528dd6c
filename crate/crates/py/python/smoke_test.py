"""Smoke test for the cbset_py extension.

Build and install first:  pip install --no-build-isolation -e crates/py
"""

import cbset_py as cb


def main() -> None:
    g = cb.parse("geom(0, 1, 1/2, closed)")
    assert str(g) == "geom(0, 1, 1/2, closed)"
    assert g.rank() == 2
    assert g.is_closed() and g.is_compact() and not g.is_discrete()
    assert "1/4" in g and "1/3" not in g
    assert str(g.acc()) == "fin{0}"
    assert g.enumerate(3) == ["0", "1/4", "1/2", "1"]
    assert cb.SetExpr("fin{1}").acc() is None

    x = cb.parse("msum(geom(0, 1, 1/2), geom(0, 1, 1/3))")
    assert x.rank() == 3
    assert [cb.kbound(r) for r in ([0], [1], [1, 1])] == [1, 2, 5]

    plan = cb.linear_image_decompose([g, g], ["1", "-1/3"])
    assert plan["K"] == 5
    assert len(plan["pieces"]) <= plan["K"]
    assert all(p["set"].is_discrete() for p in plan["pieces"])

    tc = cb.tail_combine(g, cb.parse("tail(0, 1/2, up)"), (-20, 20))
    assert tc["M"] == 3 and tc["ordering_holds"]

    assert cb.hypothesis_check(g, 2, 4, seed=1)["pass"]

    d = ["1/2", "3", "7/3"]
    a = cb.ex1_encode(4, d)
    assert sorted(cb.ex1_decode(4, a)) == sorted(d)
    pairs, violations = cb.ex1_claim_check(4, d, 6)
    assert pairs == 15 and violations == []

    report = cb.cantor_verify(4, 10)
    assert report["pass"] and report["words"] == 30
    assert cb.non_isolation_witness([1], 2) == [0, 2]

    try:
        cb.parse("geom(0, 1, 3/2)")
    except ValueError as e:
        assert str(e).startswith("1:1:"), e
    else:
        raise AssertionError("bad ratio accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
