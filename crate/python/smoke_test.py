"""Smoke test for the `exfl` extension: localizes the Math-98 fixture."""

import pathlib

import exfl

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "crates/core/tests/fixtures"
FILE = "org/apache/commons/math/linear/BigMatrixImpl.java"


def main():
    m98 = FIXTURES / "math98"
    trace_text = (m98 / "trace.txt").read_text()

    trace = exfl.parse_stack_trace(trace_text)
    assert trace.exception_type == "java.lang.ArrayIndexOutOfBoundsException"
    assert trace.frames[0][3] == 38

    model = exfl.SourceModel.from_roots([str(m98 / "src")])
    assert len(model) == 1
    assert "(method BigDecimal[] operate" in model.dump_ast(FILE)
    assert exfl.dump_ast("class A { int f() { return 1; } }").startswith("(unit")

    sbfl = exfl.ochiai((m98 / "spectrum.txt").read_text())
    assert sbfl.to_json() == (m98 / "sbfl.json").read_text()
    assert exfl.position(sbfl, FILE, 32) == 5.0

    loc = exfl.localize(trace_text, model, sbfl)
    assert loc.fallback is None
    assert loc.except_targets == 6
    ranked = loc.ranking
    top = ranked.entries[0]
    assert (top.line, top.expression, top.guessed_faults) == (38, "out", ["ARRAY_VARIABLE_WRONG"])
    assert top.suspiciousness == 2.0
    assert ranked.position(FILE, 32) == 2.0
    assert abs(sum(ranked.probability(FILE, l) for l in {e.line for e in ranked.entries}) - 1.0) < 1e-9

    fallback = exfl.localize(trace_text, model, sbfl, analyzers=["npe"])
    assert fallback.fallback is not None
    assert fallback.ranking.to_json() == sbfl.to_json()

    ssfix = exfl.ssfix_rerank(sbfl, trace_text, model)
    assert ssfix.entries[0].suspiciousness is None
    try:
        exfl.probability(ssfix, FILE, 32)
    except ValueError:
        pass
    else:
        raise AssertionError("promoted rankings have no probability")

    try:
        exfl.parse_stack_trace("nothing to see")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed trace accepted")

    print("exfl smoke test passed")


if __name__ == "__main__":
    main()
