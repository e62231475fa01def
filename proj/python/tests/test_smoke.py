import pathlib

import pytest

import accelbmc

ROOT = pathlib.Path(__file__).resolve().parents[2]
CORE = ROOT / "bench" / "core"

COPY_COUNT = """
unsigned N := *;
unsigned x := N, y := 0;
while (x > 0) { x := x - 1; y := y + 1; }
assert(y = N);
"""


def test_parse_and_lower():
    cfa = accelbmc.parse(COPY_COUNT)
    assert cfa.variables == ["N", "x", "y"]
    assert len(cfa.error_vertices) == 1
    assert "x:=x-1" in cfa.edges()
    assert cfa.dot().startswith("digraph cfa {")


def test_parse_error_is_value_error():
    with pytest.raises(ValueError):
        accelbmc.parse("unsigned x; y := 1;")


def test_acceleration_and_restriction():
    acc = accelbmc.accelerate(accelbmc.parse(COPY_COUNT))
    assert acc.num_accelerators == 1
    assert acc.accelerator(0)[:2] == ["i:=*", "[i>0]"]
    restricted = accelbmc.restrict(acc)
    assert restricted.dfa_states == 6
    assert restricted.state_variable == "g"
    assert restricted.cfa.num_edges > acc.cfa.num_edges


def test_check_verdicts():
    cfa = accelbmc.parse(COPY_COUNT)
    assert accelbmc.check(cfa, 3)["verdict"] == "UNKNOWN"
    restricted = accelbmc.restrict(accelbmc.accelerate(cfa))
    assert accelbmc.check(restricted.cfa, 3)["verdict"] == "SAFE"
    bug = accelbmc.check(accelbmc.load(str(CORE / "copy_count_bug.imp")), 1)
    assert bug["verdict"] == "UNSAFE"
    assert bug["counterexample"]["steps"]


def test_oracle_at_width_4():
    summary = accelbmc.oracle(accelbmc.parse(COPY_COUNT, width=4))
    assert not summary["error_reachable"]
    assert summary["diameter_edges"] == 49


def test_run_matches_cli_record():
    record = accelbmc.run(str(CORE / "copy_count_deep.imp"), mode="accel")
    assert record["verdict"] == "UNSAFE"
    assert record["exit_code"] == 1
    assert record["bound"] == 1
    with pytest.raises(ValueError):
        accelbmc.run(str(CORE / "copy_count_deep.imp"), mode="fast")
