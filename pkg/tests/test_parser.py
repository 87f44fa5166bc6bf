import pytest
from hypothesis import given, settings, strategies as st

from api.parser import (ContextDecl, ContextLit, MapDecl, ModelDecl, PortRef, PredDecl, Program,
                        QueryDecl, RelDecl, TermDecl, TypeDecl, parse)
from api.workspace import resolve
from core.cq import emit_formula
from core.errors import (IllTypedBlock, NotAPartition, ProgramSyntaxError, ResolutionError,
                         UnknownPort)


def _read(data_path, name):
    with open(data_path(name), encoding="utf-8") as f:
        return f.read()


@pytest.mark.parametrize("name", ["wiring.rlog", "sets.rlog"])
def test_printed_programs_parse_back(data_path, name):
    program = parse(_read(data_path, name))
    assert parse(str(program)) == program


def test_declarations_are_typed(data_path):
    program = parse(_read(data_path, "wiring.rlog"))
    contexts = program.of_kind(ContextDecl)
    assert contexts[1] == ContextDecl("g2", ContextLit(("x", "x", "x"), ("w", "y")))
    example = program.of_kind(RelDecl)[0]
    assert example.inner == ("g1", "g2", "g3")
    assert example.support == ("v",)
    assert example.nodes[5].ports[0] == PortRef(2, 1)
    assert example.nodes[0].ports[2] == PortRef("out", 1)
    assert program.of_kind(TermDecl)[0] == TermDecl("ex", "example", ("th1", "th2", "th3"))
    assert [q.command for q in program.of_kind(QueryDecl)] == ["emit-formula", "leq"]


def test_model_items(data_path):
    model = parse(_read(data_path, "sets.rlog")).of_kind(ModelDecl)[0]
    assert model.of_kind(TypeDecl) == (TypeDecl("x", ("a", "b")),)
    assert model.of_kind(PredDecl)[1] == PredDecl("q", ContextLit(("x",)), (("a",),))
    assert model.of_kind(MapDecl)[1] == MapDecl("const", "p", "p", "constg")


def test_comments_and_whitespace_are_ignored():
    program = parse("# nothing here\n\n  query show id ; # trailing\n")
    assert program == Program((QueryDecl(("show", "id")),))


@pytest.mark.parametrize("source, line", [
    ("context g = [x, y;", 1),
    ("rel r : [x] -> [x] {\n  node n : x = 1.1 out.1;\n}", 2),
    ("model m {\n  type x = {a};\n  pred p on [x] = {a};\n}", 3),
    ("query ;", 1),
])
def test_syntax_errors_carry_positions(source, line):
    with pytest.raises(ProgramSyntaxError) as info:
        parse(source)
    assert info.value.line == line
    assert info.value.column > 0


def test_resolution_of_the_example(data_path):
    ws = resolve(parse(_read(data_path, "wiring.rlog")))
    rel = ws.relation("example")
    assert rel.n_blocks == 7
    assert [str(s) for s in rel.white_dot] == ["v", "w"]
    assert str(emit_formula(ws.term("ex"))).startswith("{(v3:y, v6:z, v6_2:z, v5:x, v4:x, v7:z)")
    assert len(ws.queries) == 2


@pytest.mark.parametrize("body, error, fragment", [
    ("node a : x = 1.1, out.1; node b : x = 1.1;", NotAPartition, "nodes a and b"),
    ("node a : y = 1.1, out.1;", IllTypedBlock, "node a"),
    ("node a : x = 2.1, out.1;", UnknownPort, "no shell 2"),
    ("node a : x = 1.1, out.2;", UnknownPort, "no port 2"),
    ("node a : x = 1.1;", NotAPartition, "out.1"),
    ("node a : x = h.1, out.1;", ResolutionError, "matches 0 shells"),
])
def test_resolution_errors_name_the_node(body, error, fragment):
    source = f"rel r : [x] -> [x] {{ {body} }}"
    with pytest.raises(error, match=fragment):
        resolve(parse(source))


def test_terminators_are_optional_and_outer_shells_resolve_by_name():
    source = """
    context A = [x]
    context C = [x, x]
    rel r : A -> C {
      node n : x = A.1, C.1, C.2
    }
    model m {
      type x = {a, b}
      pred p on A = {(a)}
    }
    term t = rel r with (p)
    query eval t;
    """
    ws = resolve(parse(source))
    assert str(ws.relation("r")) == "[x] -> [x, x] {x(1.1, out.1, out.2)} support {x}"
    assert ws.term("t").leaves[0].name == "p"
    assert str(ws.model().predicates["p"]) == "{(a)}"
    assert [q.command for q in ws.queries] == ["eval"]


def test_shell_names_shared_by_inner_and_outer_are_ambiguous():
    source = "context A = [x]\nrel s : A -> A { node n : x = A.1, A.1 }"
    with pytest.raises(ResolutionError, match="matches 2 shells"):
        resolve(parse(source))


def test_duplicate_and_missing_names():
    rel = "rel r : [x] -> [x] { node a : x = 1.1, out.1; }"
    with pytest.raises(ResolutionError, match="declared twice"):
        resolve(parse(rel + rel.replace("node a", "node b")))
    with pytest.raises(ResolutionError, match="no relation named s"):
        resolve(parse("term t = rel s with (p);"))
    with pytest.raises(ResolutionError, match="no context named g"):
        resolve(parse("rel r : g -> [x] { node a : x = out.1; }"))
    with pytest.raises(ResolutionError, match="1 shells but 2 leaves"):
        resolve(parse(rel + "term t = rel r with (p, q);"))


def test_model_resolution(data_path):
    ws = resolve(parse(_read(data_path, "sets.rlog")))
    env = ws.model()
    assert str(env.predicates["idg"]) == "{(a,a),(b,b)}"
    assert not env.maps["const"].certified
    with pytest.raises(ResolutionError):
        ws.model("other")
    with pytest.raises(ResolutionError, match="no predicate r"):
        resolve(parse("model m { type x = {a}; pred p on [x] = {(a)}; map f : p -> r = p; }"))


names = st.from_regex(r"[a-z][a-z0-9_]{0,5}", fullmatch=True).filter(
    lambda s: s not in {"context", "rel", "model", "term", "query", "node", "support",
                        "type", "pred", "map", "on", "with", "out"})
literals = st.builds(ContextLit, st.lists(names, max_size=3).map(tuple),
                     st.lists(names, max_size=2).map(tuple))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.one_of(
    st.builds(ContextDecl, names, literals),
    st.builds(TermDecl, names, names, st.lists(names, max_size=3).map(tuple)),
    st.builds(QueryDecl, st.lists(names, min_size=1, max_size=3).map(tuple)),
), max_size=5))
def test_generated_programs_survive_printing(decls):
    program = Program(tuple(decls))
    assert parse(str(program)) == program
