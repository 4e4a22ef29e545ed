import itertools
import random
import warnings
from math import comb
from unittest import TestCase

import networkx as nx
import pytest

import cocite
from cocite.affiliation import build_affiliation
from cocite.corpus import Corpus
from cocite.exceptions import CociteWarning
from cocite.exceptions import UnknownCaseError
from cocite.graph import CoCitationGraph
from cocite.graph import connected_components
from cocite.graph import exclude
from cocite.graph import exclude_outliers
from cocite.graph import isolate_outliers
from cocite.graph import merge_graphs
from cocite.graph import project
from tests.builders import make_catalog
from tests.builders import make_corpus
from tests.builders import OUTLIER_CASE
from tests.builders import OUTLIER_CODES


def _project(corpus: Corpus) -> CoCitationGraph:
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', CociteWarning)
        return project(build_affiliation(corpus))


def _codes(nodes):
    return [p.short_code for p in nodes]


def _random_cited(rng: random.Random, n_provisions: int, n_judgments: int):
    codes = 'ABCDEFGHIJKL'[:n_provisions]
    return [''.join(rng.sample(codes, rng.randint(0, min(5, n_provisions)))) for _ in range(n_judgments)]


class TestProjection(TestCase):
    def test_single_clique(self) -> None:
        graph = _project(make_corpus(['ABC']))
        assert _codes(graph.nodes) == ['A', 'B', 'C']
        assert graph.edge_count == 3
        assert all(graph.weight(u, v) == 1 for u, v in graph.edges)

    def test_accumulation(self) -> None:
        corpus = make_corpus(['AB', 'BA'])
        graph = _project(corpus)
        a, b = corpus.catalog.lookup('A'), corpus.catalog.lookup('B')
        assert graph.edges == [(a, b)]
        assert graph.weight(a, b) == graph.weight(b, a) == 2
        assert graph.provenance(b, a) == {'case000', 'case001'}

    def test_single_citation_is_isolated(self) -> None:
        corpus = make_corpus(['A', 'BC'])
        graph = _project(corpus)
        a = corpus.catalog.lookup('A')
        assert a in graph
        assert graph.neighbors(a) == []
        assert graph.size == 3

    def test_uncited_provisions_are_not_nodes(self) -> None:
        graph = _project(make_corpus(['AB'], catalog=make_catalog('ABCD')))
        assert _codes(graph.nodes) == ['A', 'B']

    def test_graph_is_frozen(self) -> None:
        graph = _project(make_corpus(['AB']))
        with pytest.raises(nx.NetworkXError):
            graph.nx_graph.add_edge('x', 'y')

    def test_clique_and_weight_conservation(self) -> None:
        rng = random.Random(20230501)
        for _ in range(200):
            cited = _random_cited(rng, rng.randint(1, 12), rng.randint(0, 30))
            corpus = make_corpus(cited)
            graph = _project(corpus)
            for judgment in corpus:
                for u, v in itertools.combinations(judgment.cited, 2):
                    assert judgment.case_id in graph.provenance(u, v)
            assert graph.total_weight == sum(comb(len(j.cited), 2) for j in corpus)
            for u, v in graph.edges:
                assert u != v
                assert graph.weight(u, v) == len(graph.provenance(u, v)) >= 1
            assert set(graph.nodes) == set().union(*(j.cited for j in corpus))

    def test_merge_associativity(self) -> None:
        rng = random.Random(7)
        for _ in range(50):
            cited = _random_cited(rng, 8, 24)
            whole = make_corpus(cited)
            cut = rng.randint(0, len(cited))
            ids = whole.case_ids
            left = whole.without(ids[cut:])
            right = whole.without(ids[:cut])
            merged = merge_graphs(_project(left), _project(right))
            expected = _project(whole)
            assert merged.nodes == expected.nodes
            assert merged.edges == expected.edges
            for u, v in expected.edges:
                assert merged.provenance(u, v) == expected.provenance(u, v)

    def test_merge_rejects_overlapping_cases(self) -> None:
        graph = _project(make_corpus(['AB']))
        with pytest.raises(ValueError):
            merge_graphs(graph, graph)


class TestComponents(TestCase):
    def test_triangle(self) -> None:
        partition = connected_components(_project(make_corpus(['ABC'])))
        assert len(partition.components) == 1
        assert partition.main == 0

    def test_empty(self) -> None:
        partition = connected_components(_project(make_corpus([])))
        assert partition.components == []
        assert partition.main is None
        assert partition.main_component == frozenset()

    def test_ordering(self) -> None:
        # same size: heavier component first; same size and weight: earliest catalog member first
        graph = _project(make_corpus(['EF', 'AB', 'CD', 'CD', 'GHI']))
        partition = connected_components(graph)
        assert [c.codes for c in partition.components] == ['G, H, I', 'C, D', 'A, B', 'E, F']
        assert [c.weight for c in partition.components] == [3, 2, 1, 1]

    def test_components_partition_nodes(self) -> None:
        rng = random.Random(11)
        for _ in range(50):
            graph = _project(make_corpus(_random_cited(rng, 12, 10)))
            partition = connected_components(graph)
            members = [p for c in partition.components for p in c.nodes]
            assert sorted(members, key=graph.position) == graph.nodes

    def test_fixture_has_two_components(self) -> None:
        graph = _project(cocite.bundled_corpus)
        partition = connected_components(graph)
        assert graph.size == 22
        assert [len(c.nodes) for c in partition.components] == [18, 4]
        assert set(partition.components[1].codes.split(', ')) == set(OUTLIER_CODES)


class TestOutliers(TestCase):
    def setUp(self) -> None:
        self.corpus = cocite.bundled_corpus
        self.graph = _project(self.corpus)

    def test_only_the_isolated_case_is_flagged(self) -> None:
        flagged = isolate_outliers(self.graph, self.corpus)
        assert [f.case_id for f in flagged] == [OUTLIER_CASE]
        assert "Q', M', D', H'" in flagged[0].reason

    def test_partial_overlap_is_kept(self) -> None:
        corpus = make_corpus(['ABC', 'AB', 'BC', 'CD', 'XY', 'AX'])
        graph = _project(corpus)
        assert isolate_outliers(graph, corpus) == []

    def test_single_component(self) -> None:
        corpus = make_corpus(['AB', 'BC'])
        assert isolate_outliers(_project(corpus), corpus) == []

    def test_empty_citation_is_never_flagged(self) -> None:
        corpus = make_corpus(['AB', 'BC', '', 'XY'])
        flagged = isolate_outliers(_project(corpus), corpus)
        assert [f.case_id for f in flagged] == ['case003']

    def test_exclusion_end_to_end(self) -> None:
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', CociteWarning)
            result = exclude_outliers(self.corpus)
        assert [f.case_id for f in result.outliers] == [OUTLIER_CASE]
        assert len(result.corpus) == 48
        post = _project(result.corpus)
        assert post.size == 18
        assert len(connected_components(post).components) == 1

    def test_repeated_passes_stop_when_nothing_is_flagged(self) -> None:
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', CociteWarning)
            once = exclude_outliers(self.corpus, passes=1)
            thrice = exclude_outliers(self.corpus, passes=3)
        assert thrice.outliers == once.outliers
        assert thrice.corpus.case_ids == once.corpus.case_ids

    def test_exclusion_reaches_a_fixpoint_in_one_pass(self) -> None:
        rng = random.Random(3)
        for _ in range(50):
            corpus = make_corpus(_random_cited(rng, 12, 15))
            with warnings.catch_warnings():
                warnings.simplefilter('ignore', CociteWarning)
                once = exclude_outliers(corpus, passes=1)
                again = exclude_outliers(corpus, passes=4)
            assert again.corpus.case_ids == once.corpus.case_ids
            graph = _project(once.corpus)
            assert len(connected_components(graph).components) <= 1

    def test_passes_must_be_positive(self) -> None:
        with pytest.raises(ValueError):
            exclude_outliers(self.corpus, passes=0)


def test_exclude() -> None:
    corpus = cocite.bundled_corpus
    assert len(exclude(corpus, [OUTLIER_CASE])) == 48
    assert exclude(corpus, []).judgments == corpus.judgments
    emptied = exclude(corpus, corpus.case_ids)
    assert len(emptied) == 0
    assert _project(emptied).size == 0
    with pytest.raises(UnknownCaseError, match='nope'):
        exclude(corpus, ['nope'])
    return None


def test_relabeling_preserves_component_shapes() -> None:
    cited = ['AB', 'BC', 'DE', 'FGH', 'I']
    graph = _project(make_corpus(cited))
    relabeled = _project(make_corpus(cited, catalog=make_catalog('IHGFEDCBA')))
    shapes = [(len(c.nodes), c.weight) for c in connected_components(graph).components]
    assert shapes == [(len(c.nodes), c.weight) for c in connected_components(relabeled).components]
    return None
