import io
import json

import numpy as np
import pytest

from hullmce import matspace as ms
from hullmce.code import hull_basis
from hullmce.errors import ParseError, ValidationError
from hullmce.instances import (
    INSTANCE_SCHEMA,
    charpoly_class_stats,
    gen_conjugacy_pair,
    gen_instance,
    gen_negative_instance,
    histogram_fraction,
    hull_dim_stats,
    instance_to_json,
    read_instance,
    read_solution,
    verify_solution,
    write_histogram_csv,
    write_instance,
    write_solution,
)


def test_gen_instance_deterministic():
    a, sa = gen_instance(11, 4, 4, 12, 9)
    b, sb = gen_instance(11, 4, 4, 12, 9)
    assert a == b and np.array_equal(sa.P, sb.P)
    assert verify_solution(a, sa.P, sa.Q)


def test_verify_rejects():
    inst, sol = gen_instance(7, 3, 3, 4, 0)
    F = inst.field
    assert not verify_solution(inst, F.zeros((3, 3)), sol.Q)
    assert not verify_solution(inst, sol.P, F.zeros((2, 2)))
    assert not verify_solution(inst, F.eye(3), F.eye(3)) or inst.C == inst.D
    neg = gen_negative_instance(7, 3, 3, 4, 0)
    assert not verify_solution(neg, sol.P, sol.Q)


def test_gen_conjugacy_pair():
    C, D, P0 = gen_conjugacy_pair(11, 4, 12, 0)
    F = C.field
    assert len(hull_basis(C)) == 1
    assert all(ms.trace(F, X)[0] == 0 for X in C.basis)
    assert ms.is_invertible(F, P0)


def test_json_roundtrip(tmp_path):
    inst, sol = gen_instance(11, 3, 4, 5, 1)
    path = tmp_path / "i.json"
    write_instance(path, inst, sol)
    back, bsol = read_instance(path)
    assert back == inst and np.array_equal(bsol.P, sol.P)
    spath = tmp_path / "s.json"
    write_solution(spath, sol.P, sol.Q, {"draws": 3})
    P, Q = read_solution(spath, inst)
    assert verify_solution(inst, P, Q)
    assert json.loads(spath.read_text())["stats"] == {"draws": 3}


def test_stream_io():
    inst, _ = gen_instance(7, 3, 3, 3, 2)
    buf = io.StringIO()
    write_instance(buf, inst)
    buf.seek(0)
    assert read_instance(buf)[0] == inst


def _obj():
    inst, _ = gen_instance(7, 3, 3, 3, 2)
    return instance_to_json(inst)


@pytest.mark.parametrize(
    "mutate,err",
    [
        (lambda o: o.pop("q"), ParseError),
        (lambda o: o.update(q="7"), ParseError),
        (lambda o: o.update(schema="other/1"), ParseError),
        (lambda o: o.update(k=4), ValidationError),
        (lambda o: o.update(q=9), ValidationError),
        (lambda o: o["C"].__setitem__(0, [[1, 2], [3, 4]]), ValidationError),
        (lambda o: o["C"].__setitem__(0, [[1, 2, 3], [3, 4]]), ParseError),
    ],
)
def test_parse_errors(mutate, err):
    obj = _obj()
    mutate(obj)
    with pytest.raises(err):
        read_instance(io.StringIO(json.dumps(obj)))


def test_invalid_json_location():
    with pytest.raises(ParseError, match="line 2"):
        read_instance(io.StringIO('{"schema":\n oops}'))


def test_schema_constant():
    assert _obj()["schema"] == INSTANCE_SCHEMA


def test_hull_stats_reproducible_across_workers():
    a = hull_dim_stats(7, 4, 8, 1200, seed=3, workers=1)
    b = hull_dim_stats(7, 4, 8, 1200, seed=3, workers=2)
    assert a == b and sum(a.values()) == 1200
    assert 0 < histogram_fraction(a, 1) < 1


def test_histogram_csv():
    text = write_histogram_csv({0: 3, 1: 1})
    assert text.splitlines() == ["dim,count,fraction", "0,3,0.750000", "1,1,0.250000"]


def test_class_stats():
    st = charpoly_class_stats(11, 4, 4, 12, 2000, seed=1)
    assert st.qualifying == sum(st.frequencies.values()) <= 2000
    assert 0 < st.distinct <= 11
    assert st.max_min_ratio >= 1
