import io

from qsplit.trace import TRACE_COLUMNS, Trace, is_nonincreasing, read_records, records_to_csv, trace_records


def _trace():
    t = Trace()
    t.add(0, 0, None, 5.0, 5.0, 0.0)
    t.add(1, 0, 0.5, 3.0, 3.0, 1.2)
    t.add(1, 1, 1.5, 4.0, 3.0, 0.9)
    return t


def test_trace_counts_calls():
    t = _trace()
    assert [r.call for r in t] == [0, 1, 2]
    assert t.solver_calls == 2
    assert Trace().solver_calls == 0
    assert t.best_energies() == [5.0, 3.0, 3.0]


def test_csv_round_trip():
    recs = list(trace_records(_trace(), "reg:4", 4, "splitting", 7, objective=lambda e: -e))
    text = records_to_csv(recs)
    assert text.splitlines()[0] == ",".join(TRACE_COLUMNS)
    back = read_records(io.StringIO(text))
    assert back == recs
    assert back[0]["lambda"] is None and back[1]["best_objective"] == -3.0


def test_floats_survive_exactly():
    t = Trace()
    t.add(0, 0, 0.1 + 0.2, 1 / 3, 1 / 3, 0.0)
    back = read_records(io.StringIO(records_to_csv(trace_records(t, "x", 1, "m", 0))))
    assert back[0]["energy"] == 1 / 3 and back[0]["lambda"] == 0.1 + 0.2


def test_is_nonincreasing():
    assert is_nonincreasing([3, 3, 2])
    assert not is_nonincreasing([3, 4])
    assert is_nonincreasing([])
