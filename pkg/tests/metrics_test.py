import itertools
import random
import string
import time
import warnings
from math import comb
from typing import Dict
from typing import List

import networkx as nx
import pytest

from cocite.affiliation import build_affiliation
from cocite.corpus import Corpus
from cocite.exceptions import CociteWarning
from cocite.exceptions import UnknownProvisionError
from cocite.graph import CoCitationGraph
from cocite.graph import project
from cocite.metrics import argmax_nodes
from cocite.metrics import betweenness
from cocite.metrics import degree
from cocite.metrics import density
from cocite.metrics import density_band
from cocite.metrics import metrics_table
from cocite.metrics import round_half_away
from cocite.metrics import size
from tests.builders import fixture_corpus
from tests.builders import make_catalog
from tests.builders import make_corpus
from tests.builders import TABLE_DEGREES

CODES = string.ascii_uppercase


def _project(corpus: Corpus) -> CoCitationGraph:
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', CociteWarning)
        return project(build_affiliation(corpus))


def _from_edges(n: int, edges) -> CoCitationGraph:
    """One judgment per edge, plus one single-citation judgment per node so isolated nodes are kept."""
    cited = [CODES[i] for i in range(n)] + [CODES[u] + CODES[v] for u, v in edges]
    return _project(make_corpus(cited))


def _by_code(values) -> Dict[str, float]:
    return {p.short_code: v for p, v in values.items()}


def _brute_force_betweenness(g: nx.Graph) -> Dict[object, float]:
    scores = {v: 0.0 for v in g}
    for s, t in itertools.combinations(g, 2):
        if not nx.has_path(g, s, t):
            continue
        paths = list(nx.all_shortest_paths(g, s, t))
        for path in paths:
            for v in path[1:-1]:
                scores[v] += 1 / len(paths)
    return scores


def _random_tree(n: int, seed: int) -> nx.Graph:
    # random_tree was replaced by random_labeled_tree in networkx 3.4
    if hasattr(nx, 'random_labeled_tree'):
        return nx.random_labeled_tree(n, seed=seed)
    return nx.random_tree(n, seed=seed)


def test_degree_examples() -> None:
    corpus = make_corpus(['ABC'])
    graph = _project(corpus)
    assert degree(graph, corpus.catalog.lookup('A')) == 2
    star = _from_edges(4, [(0, 1), (0, 2), (0, 3)])
    assert degree(star, star.nodes[0]) == 3
    with pytest.raises(UnknownProvisionError):
        degree(graph, corpus.catalog.lookup('Z'))
    return None


def test_weights_do_not_count_towards_degree() -> None:
    corpus = make_corpus(['AB', 'AB', 'AB', 'AC'])
    graph = _project(corpus)
    assert degree(graph, corpus.catalog.lookup('A')) == 2
    return None


def test_fixture_degree_column() -> None:
    graph = _project(fixture_corpus())
    degrees = {p.short_code: degree(graph, p) for p in graph.nodes}
    assert degrees == TABLE_DEGREES
    assert argmax_nodes({p: degree(graph, p) for p in graph.nodes}) == [graph.nodes[0]]
    assert graph.nodes[0].short_code == 'A'
    return None


def test_fixture_betweenness_argmax() -> None:
    graph = _project(fixture_corpus())
    scores = betweenness(graph)
    top = argmax_nodes(scores)
    assert [p.short_code for p in top] == ['A']
    assert all(v >= 0 for v in scores.values())
    by_code = _by_code(scores)
    assert by_code['C'] == pytest.approx(by_code['G'])
    return None


def test_fixture_overall_metrics() -> None:
    report = metrics_table(_project(fixture_corpus()))
    assert report.overall.size == 18
    assert report.overall.arcs == 92
    assert report.overall.edges == 46
    assert report.overall.density == pytest.approx(0.301, abs=0.0005)
    assert round_half_away(report.overall.density) == 0.301
    assert report.density_band == 'dense'
    assert [m.provision.short_code for m in report.per_node] == list(TABLE_DEGREES)
    return None


def test_havel_hakimi_realization_of_table_degrees() -> None:
    start = time.perf_counter()
    sequence = sorted(TABLE_DEGREES.values(), reverse=True)
    assert sequence == [11, 10, 10, 7, 7, 6, 6, 5, 3, 3, 3, 3, 3, 3, 3, 3, 3, 3]
    assert nx.is_graphical(sequence, method='eg')
    realization = nx.havel_hakimi_graph(sequence)
    graph = _from_edges(len(sequence), realization.edges)
    report = metrics_table(graph)
    assert sorted((m.degree for m in report.per_node), reverse=True) == sequence
    assert (report.overall.size, report.overall.arcs, report.overall.edges) == (18, 92, 46)
    assert report.overall.density == pytest.approx(0.301, abs=0.0005)
    assert time.perf_counter() - start < 1.0
    return None


def test_betweenness_path_and_disjoint_edges() -> None:
    path = _from_edges(3, [(0, 1), (1, 2)])
    assert list(betweenness(path).values()) == [0.0, 1.0, 0.0]
    disjoint = _from_edges(4, [(0, 1), (2, 3)])
    assert set(betweenness(disjoint).values()) == {0.0}
    return None


@pytest.mark.parametrize('n', range(2, 10))
def test_betweenness_path_closed_form(n: int) -> None:
    graph = _from_edges(n, [(i, i + 1) for i in range(n - 1)])
    # node i separates i * (n - 1 - i) pairs
    assert list(betweenness(graph).values()) == [float(i * (n - 1 - i)) for i in range(n)]
    return None


@pytest.mark.parametrize('m', range(1, 7))
def test_betweenness_star_closed_form(m: int) -> None:
    graph = _from_edges(m + 1, [(0, leaf) for leaf in range(1, m + 1)])
    scores = list(betweenness(graph).values())
    assert scores[0] == comb(m, 2)
    assert scores[1:] == [0.0] * m
    return None


def test_betweenness_matches_brute_force_enumeration() -> None:
    rng = random.Random(1337)
    start = time.perf_counter()
    checked = 0
    while checked < 120:
        n = rng.randint(2, 7)
        g = nx.gnp_random_graph(n, rng.uniform(0.2, 0.9), seed=rng.randrange(1 << 30))
        if not nx.is_connected(g):
            continue
        graph = _from_edges(n, g.edges)
        expected = _brute_force_betweenness(g)
        actual = betweenness(graph)
        for i, node in enumerate(graph.nodes):
            assert actual[node] == pytest.approx(expected[i], abs=1e-9)
        checked += 1
    assert time.perf_counter() - start < 10.0
    return None


def test_threaded_betweenness_is_identical() -> None:
    rng = random.Random(5)
    for _ in range(20):
        g = nx.gnp_random_graph(14, 0.3, seed=rng.randrange(1 << 30))
        graph = _from_edges(14, g.edges)
        serial = betweenness(graph)
        for workers in (2, 3, 8):
            threaded = betweenness(graph, workers=workers)
            assert list(threaded) == list(serial)
            for node in serial:
                assert threaded[node] == pytest.approx(serial[node], abs=1e-9)
            assert betweenness(graph, workers=workers) == threaded
    return None


def test_tree_properties() -> None:
    rng = random.Random(99)
    for _ in range(30):
        n = rng.randint(2, 12)
        tree = _random_tree(n, rng.randrange(1 << 30))
        graph = _from_edges(n, tree.edges)
        scores = betweenness(graph)
        for i, node in enumerate(graph.nodes):
            if tree.degree[i] == 1:
                assert scores[node] == 0.0
        lengths = dict(nx.all_pairs_shortest_path_length(tree))
        expected = sum(lengths[u][v] - 1 for u, v in itertools.combinations(range(n), 2))
        assert sum(scores.values()) == pytest.approx(expected)
    return None


def test_density_examples() -> None:
    assert density(_project(make_corpus(['ABC']))) == 1.0
    assert density(_from_edges(5, [])) == 0.0
    assert density(_project(make_corpus(['A']))) == 0.0
    assert density(_project(make_corpus([]))) == 0.0
    return None


def test_density_is_monotone_in_edges() -> None:
    n = 7
    pairs = list(itertools.combinations(range(n), 2))
    random.Random(3).shuffle(pairs)
    previous = density(_from_edges(n, []))
    for k in range(1, len(pairs) + 1):
        current = density(_from_edges(n, pairs[:k]))
        assert current > previous
        previous = current
    assert previous == 1.0
    return None


def test_size() -> None:
    assert size(_project(make_corpus([]))) == 0
    assert size(_project(make_corpus(['ABC']))) == 3
    return None


def test_metrics_table_small_graphs() -> None:
    triangle = metrics_table(_project(make_corpus(['ABC'])))
    assert (triangle.overall.arcs, triangle.overall.edges, triangle.overall.density) == (6, 3, 1.0)
    assert triangle.density_band == 'dense'
    single = metrics_table(_project(make_corpus(['A'])))
    assert (single.overall.size, single.overall.density) == (1, 0.0)
    assert single.density_band == 'sparse'
    return None


def test_handshake_on_random_graphs() -> None:
    rng = random.Random(42)
    for _ in range(40):
        n = rng.randint(1, 10)
        g = nx.gnp_random_graph(n, rng.random(), seed=rng.randrange(1 << 30))
        report = metrics_table(_from_edges(n, g.edges))
        assert report.overall.arcs == 2 * report.overall.edges == 2 * g.number_of_edges()
    return None


def test_density_band_threshold() -> None:
    assert density_band(0.25) == 'sparse'
    assert density_band(0.2500001) == 'dense'
    return None


def test_round_half_away() -> None:
    assert round_half_away(0.3005) == 0.301
    assert round_half_away(2.0625) == 2.063
    assert round_half_away(-0.0005) == -0.001
    assert round_half_away(32.0666666) == 32.067
    return None


def test_catalog_order_of_report_rows() -> None:
    catalog = make_catalog('ZYX')
    graph = _project(make_corpus(['XZ', 'YZ'], catalog=catalog))
    rows: List[str] = [m.provision.short_code or '' for m in metrics_table(graph).per_node]
    assert rows == ['Z', 'Y', 'X']
    return None
