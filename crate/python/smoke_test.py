"""Smoke test for the termsat_py extension module."""

import json

import termsat_py as ts

ARITH = ["@comm_monoid", "@comm_group", "@folder", "@div_sim"]


def main():
    term, report = ts.simplify("(/ (* a (* 2 3)) 6)", ARITH)
    assert term == "a", term
    report = json.loads(report)
    assert set(report) == {"stop_reason", "iterations", "n_enodes", "n_eclasses", "rules"}, report

    assert ts.prove("(+ a (+ b c))", "(+ (+ a b) c)", ["@comm_group"])
    assert not ts.prove("(+ a b)", "(* a b)", ["@comm_group"])

    assert ts.rewrite("(+ 1 2)", ["(+ ~a::number ~b::number) => (+ ~a ~b)"]) == "3"
    assert ts.sign("(* 3 x)", ["x=+"]) == "+1"
    assert ts.sign("(/ k k)", ["k=inf"]) == "NaN"
    assert ts.optimize_stream("(getindex (map (lambda x (* 7 x)) (fill 3 4)) 1)") == "21"
    assert "stream" in ts.bundled_theories()

    try:
        ts.simplify("(f", [])
    except ValueError as e:
        assert "syntax error" in str(e)
    else:
        raise AssertionError("expected ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
