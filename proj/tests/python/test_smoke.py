import json

import popproto


def test_binary_flock_shape():
    p = popproto.flock_binary(13)
    assert p.num_states == 7
    assert p.max_arity == 3
    assert popproto.lowered_state_count(p) == 10
    q = popproto.to_2way(p)
    assert q.num_states == 10
    assert q.max_arity == 2


def test_decide_and_verify():
    p = popproto.flock_binary(3)
    assert [popproto.decide(p, {"x": x}) for x in range(1, 6)] == ["0", "0", "1", "1", "1"]
    assert popproto.verify(p, "x >= 3", "x=1..6") == "pass"
    assert popproto.verify(p, "x >= 4", "x=1..6") == "fail"
    assert popproto.verify(p, "x >= 3", "x=1..6", node_limit=2) == "inconclusive"


def test_majority_and_linear():
    m = popproto.majority_leaders(2)
    assert m.leaders == {"y": 2}
    lin = popproto.linear_inequality([1, -1], 0)
    assert popproto.decide(lin, {"x1": 2, "x2": 1}) == "1"
    assert popproto.decide(lin, {"x1": 1, "x2": 1}) == "0"
    sys = popproto.linear_system([[1, 0], [0, 1]], [0, 0])
    assert json.loads(sys.meta)["construction"] == "system"


def test_json_round_trip():
    p = popproto.flock_binary(5)
    assert popproto.Protocol.from_json(p.to_json()) == p


def test_simulation_is_seeded():
    p = popproto.flock_binary(8)
    a = popproto.simulate(p, {"x": 20}, trials=3, seed=9)
    b = popproto.simulate(p, {"x": 20}, trials=3, seed=9)
    assert a == b
    assert all(status == "stabilized-1" for status, _ in a)


def test_semigroup_and_cli():
    p = popproto.from_semigroup("double2")
    assert popproto.decide(p, {"x": 1}) == "0"
    assert popproto.decide(p, {"x": 2}) == "1"
    code, out, _ = popproto.run_cli(["info", "flock-binary(3)"])
    assert code == 0
    assert out.startswith("5 states, 2-way only, 0 leaders")


def test_errors_surface_as_value_errors():
    try:
        popproto.flock_standard(0)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")
