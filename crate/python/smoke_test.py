"""Smoke test for the linemin extension module."""

import json

import linemin
from linemin import Matroid

fano = Matroid.pg(3, 2)
assert (fano.size, fano.rank, fano.epsilon()) == (7, 3, 7)
assert fano.is_simple() and fano.is_round()
assert len(fano.lines()) == 7
assert fano.projective_order() == 2
assert fano.has_u2n_minor(4) is False
assert fano.max_line_minor()["points"] == 3

lines = Matroid.uniform(2, 3).direct_sum(Matroid.uniform(2, 3))
assert not lines.is_round()
assert lines.connectivity([0, 1, 2], [3, 4, 5]) == 0

m = Matroid.from_matrix(open("data/fano-plus-point.mat").read())
found = m.max_line_minor()
assert found["points"] == 5, found
assert m.verify(json.dumps(found["certificate"]))
assert m.contract([3]).epsilon() == 5

assert Matroid.from_json(fano.to_json()).epsilon() == 7
assert linemin.theta(4, 3) == 21
assert linemin.largest_prime_power_leq(6) == 5
assert linemin.gap_check(1000)

report = linemin.check_kung("pg3q2-restrictions", 2)
assert report["summary"]["violations"] == []
assert report["summary"]["extremal"] == ["pg3q2/1111111"]

try:
    Matroid.from_matrix("2 1 2\n1 x\n")
except ValueError as e:
    assert "2:3" in str(e)
else:
    raise AssertionError("bad matrix accepted")

print("python smoke test: ok")
