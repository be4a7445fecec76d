import itertools

import pytest
from hypothesis import given, strategies as st

from hogsos.hospec import (
    Arg,
    DesugarError,
    FunApp,
    FunTable,
    HORule,
    HOSpec,
    Kind,
    Label,
    LawFun,
    LawInput,
    LawInputError,
    Mode,
    PartialRule,
    Premise,
    Reduct,
    SpecSyntaxError,
    YVal,
    desugar,
    format_rule,
    instantiate_law,
    parse_spec,
    validate,
    xgen,
    ygen,
)
from hogsos.instances import data_path
from hogsos.terms import Meta, Op, Signature

SKIU_TEXT = data_path("skiu.spec").read_text()


def app(a, b):
    return Op("app", (a, b))


def test_skiu_desugars_to_one_rule_per_shape(skiu):
    spec = skiu.spec
    assert validate(spec).ok
    assert str(validate(spec)) == "ok"
    shapes = [(r.op, r.W) for r in spec.rules]
    assert len(shapes) == len(set(shapes)) == 15
    expected = {(d.name, frozenset(W)) for d in spec.sig.ops
                for k in range(d.arity + 1) for W in itertools.combinations(range(1, d.arity + 1), k)}
    assert set(shapes) == expected


def test_app1_expands_to_the_two_completed_rules(skiu):
    y = Meta(FunApp(1, Arg(2)))
    a = HORule("app1-a", "app", 2, frozenset(), Kind.UNLABELLED, y)
    b = HORule("app1-b", "app", 2, frozenset({2}), Kind.UNLABELLED, y)
    got = [r for r in skiu.spec.rules if r.id.startswith("app1")]
    assert got == [a, b]


def test_full_premise_rendering(skiu):
    r = skiu.spec.rule("app1-b")
    assert format_rule(r, skiu.spec.sig) == "rule [app1-b] x1 -x1-> y1^x1, x1 -x2-> y1^x2, x2 -> y2 |- x1 x2 -> y1^x2"


def test_total_rule_is_unchanged():
    sig = Signature.of(("c", 0), ("f", 1))
    prs = [
        PartialRule("c", "c", 0, Kind.UNLABELLED, (), Op("c")),
        PartialRule("f1", "f", 1, Kind.UNLABELLED, (Premise(1, None, Reduct(1)),), Op("f", (Meta(Reduct(1)),))),
        PartialRule("f0", "f", 1, Kind.UNLABELLED, (Premise(1, Arg(1), FunApp(1, Arg(1))),), Meta(FunApp(1, Arg(1)))),
    ]
    spec = desugar(prs, sig)
    assert [r.id for r in spec.rules] == ["c", "f1", "f0"]
    assert spec.rule("f1").W == frozenset({1})
    assert validate(spec).ok


def test_ill_scoped_completion_is_reported():
    sig = Signature.of(("c", 0), ("f", 1))
    prs = [
        PartialRule("c", "c", 0, Kind.UNLABELLED, (), Op("c")),
        PartialRule("g", "f", 1, Kind.UNLABELLED, (), Op("f", (Meta(Reduct(1)),))),
    ]
    spec = desugar(prs, sig)
    assert [(r.id, r.W) for r in spec.rules if r.op == "f"] == [("g-b", frozenset({1}))]
    report = validate(spec)
    assert not report.ok
    dropped = report.of_kind("dropped")
    assert len(dropped) == 1 and dropped[0].W == frozenset() and dropped[0].metavar == Reduct(1)
    assert report.of_kind("missing")[0].W == frozenset()


def test_missing_rule_is_named():
    text = SKIU_TEXT.replace("rule [appL] x1 -> y1 |- app(x1,x2) -> app(y1,x2)\n", "")
    report = validate(parse_spec(text))
    missing = {(i.op, i.W) for i in report.of_kind("missing")}
    assert missing == {("app", frozenset({1})), ("app", frozenset({1, 2}))}
    assert "(app, W={1,2})" in str(report)


def test_duplicate_rule_in_deterministic_mode():
    text = SKIU_TEXT + "rule [I2] |- I -x-> I\n"
    report = validate(parse_spec(text))
    assert [(i.op, i.W) for i in report.of_kind("duplicate")] == [("I", frozenset())]
    # the same rules are fine once nondeterminism is allowed
    assert validate(parse_spec("nondeterministic\n" + text)).ok


def test_label_in_unlabelled_rule_is_a_scope_violation():
    sig = Signature.of(("c", 0))
    spec = HOSpec(sig, (HORule("c", "c", 0, frozenset(), Kind.UNLABELLED, Meta(Label())),))
    [issue] = validate(spec).issues
    assert issue.kind == "scope" and issue.metavar == Label()


@pytest.mark.parametrize(
    "premises, conclusion",
    [
        ((Premise(1, None, Reduct(1)), Premise(1, Arg(1), FunApp(1, Arg(1)))), Op("c")),
        ((Premise(1, None, Reduct(1)),), Meta(FunApp(1, Arg(1)))),
        ((Premise(1, Arg(1), FunApp(1, Arg(1))),), Meta(Reduct(1))),
    ],
)
def test_contradictory_premises(premises, conclusion):
    sig = Signature.of(("c", 0), ("f", 1))
    with pytest.raises(DesugarError):
        desugar([PartialRule("f", "f", 1, Kind.UNLABELLED, premises, conclusion)], sig)


def test_label_premise_in_unlabelled_rule_rejected():
    sig = Signature.of(("c", 0), ("f", 1))
    pr = PartialRule("f", "f", 1, Kind.UNLABELLED, (Premise(1, Label(), FunApp(1, Label())),), Op("c"))
    with pytest.raises(DesugarError):
        desugar([pr], sig)


@pytest.mark.parametrize(
    "text",
    [
        "op a : 0\nrule [a] |- a => a",
        "op a : 0\nrule [a] |- b -> a",
        "op a : 0\nfrobnicate",
        "op a 0",
        "op f : 1\nrule [f] |- f(x2) -> x2",
        "op a : 0\nrule [a] |- a -z-> a",
    ],
)
def test_spec_syntax_errors(text):
    with pytest.raises(SpecSyntaxError):
        parse_spec(text)


def test_sugared_conclusion_names():
    spec = parse_spec("op c : 0 ; op f : 1\nrule [c] |- c -> c\nrule [f] x1 -x-> z |- f(x1) -x-> z\n")
    assert spec.rule("f").conclusion == Meta(FunApp(1, Label()))
    assert spec.rule("f").W == frozenset()


# -- the induced law -----------------------------------------------------------

def test_law_app_with_function_on_the_left(skiu):
    w = LawInput("app", ((0, FunTable((1, 0))), (1, YVal(0))))
    assert instantiate_law(skiu.spec, 2, 2, w) == ygen(0)
    w = LawInput("app", ((0, FunTable((1, 0))), (0, FunTable((0, 0)))))
    assert instantiate_law(skiu.spec, 2, 2, w) == ygen(1)


def test_law_app_with_reduct_on_the_left(skiu):
    w = LawInput("app", ((0, YVal(1)), (1, FunTable((0, 0)))))
    assert instantiate_law(skiu.spec, 2, 2, w) == app(ygen(1), xgen(1))


def test_law_constant_is_a_table(skiu):
    got = instantiate_law(skiu.spec, 3, 1, LawInput("K", ()))
    assert got == LawFun(tuple(Op("K'", (xgen(u),)) for u in range(3)))


@pytest.mark.parametrize(
    "w",
    [
        LawInput("app", ((0, YVal(5)), (0, YVal(0)))),
        LawInput("app", ((3, YVal(0)), (0, YVal(0)))),
        LawInput("app", ((0, FunTable((0,))), (0, YVal(0)))),
        LawInput("app", ((0, "junk"), (0, YVal(0)))),
        LawInput("S'", ()),
    ],
)
def test_law_malformed_input(skiu, w):
    with pytest.raises(LawInputError):
        instantiate_law(skiu.spec, 2, 2, w)


def test_law_nondeterministic_returns_all_results(skiu_nd):
    w = LawInput("oplus", ((0, YVal(0)), (1, YVal(1))))
    assert instantiate_law(skiu_nd.spec, 2, 2, w) == (xgen(0), xgen(1))
    w = LawInput("oplus", ((1, YVal(0)), (1, YVal(1))))
    assert instantiate_law(skiu_nd.spec, 2, 2, w) == (xgen(1),)


FIRST_ORDER = """
op a : 0 ; op b : 0 ; op f : 1 ; op g : 2
rule [a] |- a -> b
rule [b] |- b -> b
rule [f] x1 -> y1 |- f(x1) -> g(y1, x1)
rule [f0] x1 -x1-> z |- f(x1) -> a
rule [g] |- g(x1, x2) -> f(x2)
"""


def test_label_free_spec_ignores_the_size_of_x():
    spec = parse_spec(FIRST_ORDER)
    assert validate(spec).ok
    for op, n in (("a", 0), ("f", 1), ("g", 2)):
        for args in itertools.product([(u, YVal(k)) for u in range(2) for k in range(2)], repeat=n):
            w = LawInput(op, args)
            assert instantiate_law(spec, 2, 2, w) == instantiate_law(spec, 3, 2, w)


# -- property: desugaring a total partial-rule set validates ------------------

SIG = Signature.of(("c", 0), ("d", 0), ("u", 1), ("b", 2), ("t", 3))


@st.composite
def total_partial_rules(draw):
    """For each operator, list some positions and give one rule per assignment
    of those positions; the unlisted ones are completed by desugaring."""
    rules = []
    for d in SIG.ops:
        n = d.arity
        listed = draw(st.lists(st.integers(1, n), unique=True, max_size=n)) if n else []
        for k, assignment in enumerate(itertools.product([True, False], repeat=len(listed))):
            kind = draw(st.sampled_from([Kind.UNLABELLED, Kind.LABELLED]))
            premises, allowed = [], [Meta(Arg(i)) for i in range(1, n + 1)]
            for pos, reduces in zip(listed, assignment):
                if reduces:
                    premises.append(Premise(pos, None, Reduct(pos)))
                    allowed.append(Meta(Reduct(pos)))
                else:
                    zs = [Arg(j) for j in range(1, n + 1)] + ([Label()] if kind is Kind.LABELLED else [])
                    premises.extend(Premise(pos, z, FunApp(pos, z)) for z in zs)
                    allowed.extend(Meta(FunApp(pos, z)) for z in zs)
            if kind is Kind.LABELLED:
                allowed.append(Meta(Label()))
            leaves = st.sampled_from(allowed + [Op("c"), Op("d")])
            concl = draw(st.recursive(
                leaves,
                lambda ch: st.one_of(st.builds(lambda a: Op("u", (a,)), ch),
                                     st.builds(lambda a, b: Op("b", (a, b)), ch, ch)),
                max_leaves=6,
            ))
            rules.append(PartialRule(f"{d.name}{k}", d.name, n, kind, tuple(premises), concl))
    return rules


@given(total_partial_rules())
def test_desugared_total_rule_sets_validate(rules):
    spec = desugar(rules, SIG, Mode.DETERMINISTIC)
    assert validate(spec).ok, str(validate(spec))
    ids = [r.id for r in spec.rules]
    assert len(ids) == len(set(ids))


@given(total_partial_rules(), st.data())
def test_law_is_total_on_valid_specs(rules, data):
    spec = desugar(rules, SIG)
    x, y = data.draw(st.integers(1, 3)), data.draw(st.integers(1, 3))
    leg = st.tuples(
        st.integers(0, x - 1),
        st.one_of(st.builds(YVal, st.integers(0, y - 1)),
                  st.builds(FunTable, st.tuples(*[st.integers(0, y - 1)] * x))),
    )
    d = data.draw(st.sampled_from(SIG.ops))
    w = LawInput(d.name, tuple(data.draw(leg) for _ in range(d.arity)))
    out = instantiate_law(spec, x, y, w)
    assert isinstance(out, (Op, Meta, LawFun))
