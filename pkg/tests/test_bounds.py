import pytest

from dsut.bounds import (
    LayerCounts,
    check_against_generation,
    communicating_subgraph,
    complex_bounds,
    counts_from_report,
    estimate,
    layer_counts,
    pairs,
    simple_bounds,
)
from dsut.generate import LayerReport, StrategyConfig, StrategyReport, make_template, run_strategy
from oracles import node

TABLE_COUNTS = {1: 7, 2: 6, 3: 14, 4: 2}


def _worst(counts):
    return [LayerCounts(n, c, c) for n, c in counts.items()]


def test_pairs():
    assert [pairs(k) for k in range(5)] == [0, 0, 1, 3, 6]


def test_simple_worst_case():
    frag = simple_bounds(_worst(TABLE_COUNTS))
    assert [frag.layer(n).total_bound for n in (1, 2, 3, 4)] == [28, 21, 105, 3]
    assert frag.total_bound == 157
    # closed form C(C+1)/2 under G = C
    assert frag.total_bound == sum(c * (c + 1) // 2 for c in TABLE_COUNTS.values())


def test_complex_worst_case():
    frag = complex_bounds(_worst(TABLE_COUNTS), 2)
    assert [frag.layer(n).total_bound for n in (1, 2, 3, 4)] == [49, 36, 196, 4]
    assert frag.total_bound == 285
    # closed form C**2 under G = C and r = 2
    assert frag.total_bound == sum(c * c for c in TABLE_COUNTS.values())


def test_fixture_worst_case_counts(fixture_model):
    counts = layer_counts(fixture_model, worst_case=True)
    report = estimate(counts)
    assert report.simple.total_bound == 157 and report.complex.total_bound == 285
    assert report.t_comp == 29 and report.redundancy == 2


@pytest.mark.parametrize("r", [1, 2, 5])
def test_single_components(r):
    counts = _worst({1: 1, 2: 1, 3: 1, 4: 1})
    assert simple_bounds(counts).total_bound == 4
    assert complex_bounds(counts, r).total_bound == 4


def test_single_layer_three_communicating():
    (lb,) = simple_bounds([LayerCounts(2, 3, 3)]).layers
    assert (lb.dist_bound, lb.total_bound) == (3, 6)


def test_redundancy_one_equals_simple():
    counts = _worst(TABLE_COUNTS)
    assert complex_bounds(counts, 1).layers == simple_bounds(counts).layers


def test_redundancy_must_be_positive():
    with pytest.raises(ValueError):
        complex_bounds(_worst(TABLE_COUNTS), 0)


def test_monotone_in_redundancy_and_size():
    counts = _worst(TABLE_COUNTS)
    totals = [complex_bounds(counts, r).total_bound for r in range(1, 6)]
    assert totals == sorted(totals) and len(set(totals)) == 5
    sizes = [simple_bounds([LayerCounts(1, c, c)]).total_bound for c in range(1, 12)]
    assert sizes == sorted(sizes)


def test_quadratic_growth():
    for c in (10, 20, 40):
        small = simple_bounds([LayerCounts(1, c, c)]).t_dist_bound
        big = simple_bounds([LayerCounts(1, 2 * c, 2 * c)]).t_dist_bound
        assert 3.5 < big / small < 4.5


def test_communicating_subgraph(fixture_model, declared):
    report = run_strategy(fixture_model, declared)
    top = communicating_subgraph(fixture_model, 4, report.layer(4).obligations)
    assert {str(r) for r in top} == {"(provider,1)", "(subscriber,1)"}
    assert communicating_subgraph(fixture_model, 4, []) == frozenset()
    assert len(communicating_subgraph(fixture_model, 3, [], worst_case=True)) == 14


def test_fixture_generation_within_bounds(fixture_model, declared):
    report = run_strategy(fixture_model, declared)
    bounds = estimate(counts_from_report(fixture_model, report))
    assert check_against_generation(report, bounds) == []


def test_corrupted_report_exceeds_bound():
    templates = [make_template(2, "path", (node(a), node(b))) for a, b in ((1, 2), (2, 3), (1, 3))]
    report = StrategyReport(StrategyConfig(), [LayerReport(2, t_union=templates)])
    bounds = estimate([LayerCounts(2, 3, 2)])
    (diag,) = check_against_generation(report, bounds)
    assert diag.code == "BOUND_EXCEEDED" and diag.layer == 2


def test_empty_report():
    assert check_against_generation(StrategyReport(StrategyConfig(), []), estimate([])) == []
