import pytest

from plref.errors import PrologSyntaxError
from plref.parser import parse_program, parse_term
from plref.terms import (
    Atom,
    ClauseItem,
    Compound,
    Conj,
    Directive,
    Disj,
    Goal,
    IfThenElse,
    Int,
    Var,
    goal_tree,
)


def test_reader_listing_items(reader_source):
    pf = parse_program(reader_source)
    assert all(isinstance(i, ClauseItem) for i in pf.items)
    heads = [(i.clause.head.name, getattr(i.clause.head, "arity", 0))
             for i in pf.items]
    assert heads == [("make_reader", 3), ("reader_code", 3), ("reader_code", 3),
                     ("reader_done", 1), ("reader_next", 3)]


def test_minimal_module():
    pf = parse_program(":- module(m,[p/1]). p(a).")
    assert len(pf.items) == 2
    assert isinstance(pf.items[0], Directive)
    assert pf.items[0].term == Compound("module", (Atom("m"),
                                        Compound(".", (Compound("/", (Atom("p"), Int(1))), Atom("[]")))))
    assert isinstance(pf.items[1], ClauseItem)
    assert pf.items[1].clause.is_fact


def test_disjunction_precedence():
    pf = parse_program("a :- b, c ; d.")
    body = pf.items[0].clause.body
    assert isinstance(body, Disj)
    assert isinstance(body.left, Conj)
    assert body.left.left == Goal(Atom("b"))
    assert body.right == Goal(Atom("d"))


def test_paper_compound():
    t = parse_term("read(Term,Stream,Position)")
    assert isinstance(t, Compound)
    assert t.name == "read" and t.arity == 3
    assert t.args[0] == Var("Term")


def test_single_variable():
    assert parse_term("X") == Var("X")


def test_arithmetic_precedence():
    t = parse_term("1+2*3")
    assert t == Compound("+", (Int(1), Compound("*", (Int(2), Int(3)))))


def test_item_spans_end_at_dot(reader_source):
    pf = parse_program(reader_source)
    for item in pf.items:
        start, end = item.span
        assert reader_source[end - 1] == "."
        chunk = reader_source[start:end]
        reparsed = parse_program(chunk)
        assert len(reparsed.items) == 1


def test_spans_disjoint_and_ordered(reader_source):
    pf = parse_program(reader_source)
    spans = [i.span for i in pf.items]
    assert spans == sorted(spans)
    for (_, e1), (s2, _) in zip(spans, spans[1:]):
        assert e1 <= s2


def test_ite_never_disj_over_arrow():
    body = parse_program("p :- ( c -> t ; e ).").items[0].clause.body
    assert isinstance(body, IfThenElse)
    assert body.cond == Goal(Atom("c"))
    assert body.then == Goal(Atom("t"))
    assert body.orelse == Goal(Atom("e"))
    assert not body.implicit_else

    extra_parens = parse_program("p :- ( ( c -> t ) ; e ).").items[0].clause.body
    assert extra_parens == body


def test_bare_if_then_gets_fail_else():
    body = parse_program("p :- ( c -> t ).").items[0].clause.body
    assert isinstance(body, IfThenElse)
    assert body.implicit_else
    assert body.orelse == Goal(Atom("fail"))


def test_disj_right_nested():
    body = parse_program("p :- ( a ; b ; c ).").items[0].clause.body
    assert isinstance(body, Disj)
    assert body.left == Goal(Atom("a"))
    assert isinstance(body.right, Disj)


def test_anonymous_vars_distinct():
    t = parse_term("p(_, _)")
    assert t.args[0].key() != t.args[1].key()
    named = parse_term("p(X, X)")
    assert named.args[0].key() == named.args[1].key()


def test_fact_has_true_body():
    clause = parse_program("h.").items[0].clause
    assert clause.is_fact
    assert clause.body == Goal(Atom("true"))
    assert clause.body_span is None


def test_lists_and_tail():
    t = parse_term("[a,b|T]")
    assert t == Compound(".", (Atom("a"), Compound(".", (Atom("b"), Var("T")))))
    assert parse_term("[]") == Atom("[]")


def test_negative_number_folding():
    assert parse_term("-1") == Int(-1)
    assert parse_term("1 - 2") == Compound("-", (Int(1), Int(2)))
    assert parse_term("2 * -1") == Compound("*", (Int(2), Int(-1)))


def test_operator_as_plain_argument():
    t = parse_term("p(-)")
    assert t == Compound("p", (Atom("-"),))


def test_op_directive_scopes_to_rest_of_file():
    pf = parse_program(":- op(700, xfx, ===). a :- x === y.")
    body = pf.items[1].clause.body
    assert body == Goal(Compound("===", (Atom("x"), Atom("y"))))
    with pytest.raises(PrologSyntaxError):
        parse_program("a :- x === y.")


def test_syntax_error_carries_span():
    with pytest.raises(PrologSyntaxError) as exc:
        parse_program("p(a.")
    assert isinstance(exc.value.span, tuple)


def test_cut_in_body():
    from plref.terms import Conj, Cut
    body = parse_program("p :- a, !, b.").items[0].clause.body
    goals = []
    node = body
    while isinstance(node, Conj):
        goals.append(node.left)
        node = node.right
    goals.append(node)
    assert isinstance(goals[1], Cut)


def test_module_qualified_goal():
    t = parse_term("m1:p(X)")
    assert t == Compound(":", (Atom("m1"), Compound("p", (Var("X"),))))


def test_operator_clash():
    from plref.errors import OperatorClash
    with pytest.raises(OperatorClash):
        parse_program("a :- b :- c.")
