import pytest

from hogsos.instances import BUILTINS, builtin, data_path, replay_golden, resolve_spec


@pytest.mark.parametrize("name", BUILTINS)
def test_builtins_load_and_describe_themselves(name):
    b = builtin(name)
    out = b.to_json()
    assert out["id"] == name and out["equivalent"]
    assert b.is_lambda == name.startswith("lambda")


@pytest.mark.parametrize("name", BUILTINS)
def test_shipped_pairs_get_the_shipped_verdicts(name):
    b = builtin(name)
    p = b.params(8, 2)
    for t1, t2 in b.equivalent:
        assert b.decide(b.parse(t1), b.parse(t2), p).bisimilar, (t1, t2)
    for t1, t2 in b.inequivalent:
        assert not b.decide(b.parse(t1), b.parse(t2), p).bisimilar, (t1, t2)


def test_golden_traces():
    assert replay_golden(builtin("skiu")) == []


def test_unknown_builtin():
    with pytest.raises(KeyError):
        builtin("nope")


def test_resolve_spec_by_name_and_path():
    _, a = resolve_spec("skiu")
    _, b = resolve_spec(str(data_path("skiu.spec")))
    assert a.rules == b.rules
    with pytest.raises(FileNotFoundError):
        resolve_spec("/no/such/file.spec")


def test_step_accessor():
    b = builtin("lambda_cbv")
    assert b.step(b.parse(r"(\. 0) (\. 0)")).__class__.__name__ == "Reduce"
    nd = builtin("skiu_nd")
    assert len(nd.step(nd.parse("oplus(S, K)"))) == 2
