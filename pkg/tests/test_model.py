import pytest

from dsut.errors import ModelBuildError, NoProjection, UnknownComponent
from dsut.factlang import ComponentRef, FactSet, parse_facts, render_facts
from dsut.model import (
    Arity,
    build_model,
    layer_view,
    lower_images,
    model_facts,
    neighbors,
    projection_arity,
)

R = ComponentRef


def _codes(text):
    with pytest.raises(ModelBuildError) as exc:
        build_model(parse_facts(text))
    return [e.code for e in exc.value.errors], exc.value.errors


OBJ = "object_(layer({n}), component_({c},{i}), type_([]), parameters_([])).\n"


def test_dangling_endpoint_names_ghost():
    text = OBJ.format(n=1, c="pc", i=1) + "connection_(layer(1), component_(pc,1), component_(ghost,1), parameters_([])).\n"
    codes, errors = _codes(text)
    assert codes == ["DanglingEndpoint"]
    assert "(ghost,1)" in errors[0].message
    assert (errors[0].line, errors[0].column) == (2, 1)


@pytest.mark.parametrize(
    "extra, code",
    [
        (OBJ.format(n=1, c="pc", i=1), "DuplicateComponent"),
        ("connection_(layer(1), component_(pc,1), component_(pc,1), parameters_([])).", "SelfLoop"),
        ("connection_(layer(1), component_(pc,1), component_(vws,1), parameters_([])).", "CrossLayerConnection"),
        ("map_(layer(2), component_(vws,1), component_(vws,1), parameters_([])).", "BadProjectionLayers"),
        ("map_(layer(1), component_(pc,1), component_(pc,1), parameters_([])).", "BadProjectionLayers"),
        (
            "connection_(layer(1), component_(pc,1), component_(pc,2), parameters_([])).\n"
            "connection_(layer(1), component_(pc,2), component_(pc,1), parameters_([])).",
            "DuplicateConnection",
        ),
        (
            "map_(layer(2), component_(vws,1), component_(pc,1), parameters_([])).\n" * 2,
            "DuplicateProjection",
        ),
    ],
)
def test_build_errors(extra, code):
    base = OBJ.format(n=1, c="pc", i=1) + OBJ.format(n=1, c="pc", i=2) + OBJ.format(n=2, c="vws", i=1)
    codes, _ = _codes(base + extra)
    assert codes == [code]


def test_all_errors_collected():
    text = (
        OBJ.format(n=1, c="a", i=1)
        + OBJ.format(n=1, c="a", i=1)
        + "connection_(layer(1), component_(a,1), component_(b,1), parameters_([])).\n"
    )
    codes, _ = _codes(text)
    assert codes == ["DuplicateComponent", "DanglingEndpoint"]


def test_empty_factset():
    model = build_model(FactSet())
    assert model.layer_refs(1) == ()
    assert layer_view(model, 2).components == ()


def test_layer_view_top_and_bottom(fixture_model):
    top = layer_view(fixture_model, 4)
    assert [c.ref for c in top.components] == [R("provider", 1), R("subscriber", 1)]
    assert len(top.connections) == 1
    assert len(top.projections) == 4
    assert {c.ref.cls for c in top.lower_components} == {"sql_server", "web_client"}
    bottom = layer_view(fixture_model, 1)
    assert len(bottom.components) == 7 and len(bottom.connections) == 6
    assert bottom.projections == () and bottom.lower_components == ()


def test_layer_view_of_missing_layer():
    model = build_model(parse_facts(OBJ.format(n=1, c="pc", i=1)))
    view = layer_view(model, 2)
    assert view.components == () and view.connections == () and view.projections == ()


def test_neighbors(fixture_model):
    assert neighbors(fixture_model, 3, R("web_server", 1)) == (
        R("sql_server", 1), R("web_client", 1), R("web_client", 2), R("web_client", 3),
    )
    with pytest.raises(UnknownComponent):
        neighbors(fixture_model, 3, R("pc", 1))


def test_neighbors_isolated_and_triangle():
    text = "".join(OBJ.format(n=1, c="n", i=i) for i in range(1, 5)) + "".join(
        f"connection_(layer(1), component_(n,{a}), component_(n,{b}), parameters_([])).\n"
        for a, b in ((1, 2), (2, 3), (3, 1))
    )
    model = build_model(parse_facts(text))
    assert neighbors(model, 1, R("n", 4)) == ()
    assert neighbors(model, 1, R("n", 1)) == (R("n", 2), R("n", 3))


def test_lower_images(fixture_model):
    assert lower_images(fixture_model, 4, R("subscriber", 1)) == tuple(R("web_client", i) for i in (1, 2, 3))
    assert lower_images(fixture_model, 2, R("vlan", 1)) == (R("switch", 1), R("switch", 2))
    assert lower_images(fixture_model, 1, R("pc", 1)) == ()


@pytest.mark.parametrize(
    "layer, ref, arity",
    [
        (4, R("subscriber", 1), Arity.ONE_TO_MANY),
        (3, R("web_server", 1), Arity.MANY_TO_ONE),
        (3, R("ss", 1), Arity.MANY_TO_ONE),
        (2, R("vws", 1), Arity.ONE_TO_ONE),
        (2, R("vlan", 1), Arity.ONE_TO_MANY),
    ],
)
def test_projection_arity(fixture_model, layer, ref, arity):
    assert projection_arity(fixture_model, layer, ref) == arity


def test_projection_arity_without_image(fixture_model):
    with pytest.raises(NoProjection):
        projection_arity(fixture_model, 1, R("pc", 1))


# ---- invariants ---------------------------------------------------------


def test_layers_partition_components(fixture_model):
    per_layer = [set(fixture_model.layer_components(n)) for n in (1, 2, 3, 4)]
    assert sum(len(s) for s in per_layer) == len(fixture_model.components)
    assert set().union(*per_layer) == set(fixture_model.components)


def test_adjacency_is_symmetric(fixture_model):
    for n in (1, 2, 3, 4):
        adj = fixture_model.adjacency(n)
        for u, vs in adj.items():
            for v in vs:
                assert u in adj[v]
                assert fixture_model.connection(n, v, u) is fixture_model.connection(n, u, v)


def test_projections_join_adjacent_layers(fixture_model):
    for p in fixture_model.projections:
        assert fixture_model.has(p.upper_layer, p.upper)
        assert fixture_model.has(p.upper_layer - 1, p.lower)


def test_canonical_rebuild(fixture_model):
    again = build_model(parse_facts(render_facts(model_facts(fixture_model))))
    assert again == fixture_model
    assert hash(again) == hash(fixture_model)
