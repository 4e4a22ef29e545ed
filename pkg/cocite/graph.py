from __future__ import annotations

import itertools
import logging
from typing import Dict
from typing import FrozenSet
from typing import Iterable
from typing import Iterator
from typing import List
from typing import NamedTuple
from typing import Optional
from typing import Set
from typing import Tuple

import networkx as nx

from .affiliation import AffiliationMatrix
from .affiliation import build_affiliation
from .corpus import Corpus
from .corpus import ProvisionRef
from .exceptions import UnknownProvisionError

Edge = Tuple[ProvisionRef, ProvisionRef]


class CoCitationGraph:
    """
    Weighted, undirected co-citation graph G(N, K) over provisions.

    Two provisions are tied when some judgment cites both; the weight is the number of such judgments and the
    provenance the set of their case_ids. The node set is every provision cited at least once, so a provision only
    ever cited alone is an isolated node. Instances are immutable.
    """

    def __init__(self, graph: nx.Graph, rows: Iterable[ProvisionRef]):
        self._rows: Tuple[ProvisionRef, ...] = tuple(rows)
        self._order: Dict[ProvisionRef, int] = {p: i for i, p in enumerate(self._rows)}
        ordered = nx.Graph()
        ordered.add_nodes_from(sorted(graph.nodes, key=self.position))
        edges = sorted((self._orient(u, v) for u, v in graph.edges), key=self._edge_key)
        for u, v in edges:
            data = graph.edges[u, v]
            cases = frozenset(data['cases'])
            if not cases or data['weight'] != len(cases):
                raise ValueError(f'Edge {u.display}-{v.display} has weight {data["weight"]} but {len(cases)} case(s)')
            ordered.add_edge(u, v, weight=len(cases), cases=cases)
        self._graph: nx.Graph = nx.freeze(ordered)

    def position(self, node: ProvisionRef) -> int:
        try:
            return self._order[node]
        except KeyError:
            raise UnknownProvisionError([node.label]) from None

    def _orient(self, u: ProvisionRef, v: ProvisionRef) -> Edge:
        return (u, v) if self.position(u) <= self.position(v) else (v, u)

    def _edge_key(self, edge: Edge) -> Tuple[int, int]:
        return (self.position(edge[0]), self.position(edge[1]))

    @property
    def rows(self) -> Tuple[ProvisionRef, ...]:
        return self._rows

    @property
    def nx_graph(self) -> nx.Graph:
        return self._graph

    @property
    def nodes(self) -> List[ProvisionRef]:
        return list(self._graph.nodes)

    @property
    def edges(self) -> List[Edge]:
        return [(u, v) for u, v in self._graph.edges]

    @property
    def size(self) -> int:
        return int(self._graph.number_of_nodes())

    @property
    def edge_count(self) -> int:
        return int(self._graph.number_of_edges())

    @property
    def total_weight(self) -> int:
        return sum(w for _, _, w in self._graph.edges(data='weight'))

    def __len__(self) -> int:
        return self.size

    def __contains__(self, node: object) -> bool:
        return node in self._graph

    def __iter__(self) -> Iterator[ProvisionRef]:
        return iter(self._graph)

    def __repr__(self) -> str:
        return f'<{self.__class__.__qualname__} N={self.size} L={self.edge_count} K={self.total_weight}>'

    def neighbors(self, node: ProvisionRef) -> List[ProvisionRef]:
        if node not in self._graph:
            raise UnknownProvisionError([node.label])
        return sorted(self._graph.neighbors(node), key=self.position)

    def weight(self, u: ProvisionRef, v: ProvisionRef) -> int:
        if not self._graph.has_edge(u, v):
            return 0
        return int(self._graph.edges[u, v]['weight'])

    def provenance(self, u: ProvisionRef, v: ProvisionRef) -> FrozenSet[str]:
        if not self._graph.has_edge(u, v):
            return frozenset()
        cases: FrozenSet[str] = self._graph.edges[u, v]['cases']
        return cases

    def subgraph_weight(self, nodes: Iterable[ProvisionRef]) -> int:
        return sum(w for _, _, w in self._graph.subgraph(nodes).edges(data='weight'))


def _accumulate(graph: nx.Graph, case_id: str, cited: List[ProvisionRef]) -> None:
    graph.add_nodes_from(cited)
    for u, v in itertools.combinations(cited, 2):
        if graph.has_edge(u, v):
            graph.edges[u, v]['cases'].add(case_id)
            graph.edges[u, v]['weight'] += 1
        else:
            graph.add_edge(u, v, weight=1, cases={case_id})


def project(matrix: AffiliationMatrix) -> CoCitationGraph:
    """
    One-mode projection of the affiliation matrix: every judgment's citation set becomes a clique, and edge
    weights accumulate across judgments.
    """
    graph = nx.Graph()
    for j, case_id in enumerate(matrix.cols):
        _accumulate(graph, case_id, matrix.column(j))
    projected = CoCitationGraph(graph, matrix.rows)
    logging.debug('Projected %r from %d judgments', projected, len(matrix.cols))
    return projected


def merge_graphs(*graphs: CoCitationGraph) -> CoCitationGraph:
    """
    Union of co-citation graphs over the same catalog; weights add and provenance is united.
    """
    if not graphs:
        raise ValueError('merge_graphs needs at least one graph')
    rows = graphs[0].rows
    merged = nx.Graph()
    for g in graphs:
        if g.rows != rows:
            raise ValueError('Cannot merge graphs projected over different catalogs')
        merged.add_nodes_from(g.nodes)
        for u, v in g.edges:
            cases = g.provenance(u, v)
            if merged.has_edge(u, v):
                overlap = merged.edges[u, v]['cases'] & cases
                if overlap:
                    raise ValueError(f'Judgment(s) {sorted(overlap)} appear in more than one merged graph')
                merged.edges[u, v]['cases'] |= cases
                merged.edges[u, v]['weight'] += len(cases)
            else:
                merged.add_edge(u, v, weight=len(cases), cases=set(cases))
    return CoCitationGraph(merged, rows)


class Component(NamedTuple):
    nodes: Tuple[ProvisionRef, ...]
    weight: int

    @property
    def members(self) -> FrozenSet[ProvisionRef]:
        return frozenset(self.nodes)

    @property
    def codes(self) -> str:
        return ', '.join(p.display for p in self.nodes)


class ComponentPartition(NamedTuple):
    components: List[Component]
    main: Optional[int]

    @property
    def main_component(self) -> FrozenSet[ProvisionRef]:
        if self.main is None:
            return frozenset()
        return self.components[self.main].members

    def component_of(self, node: ProvisionRef) -> Optional[int]:
        for i, component in enumerate(self.components):
            if node in component.members:
                return i
        return None


def connected_components(graph: CoCitationGraph) -> ComponentPartition:
    """
    Connected components ordered by node count, then total edge weight (both descending), then by the catalog
    position of each component's first member. The main component is the first one.
    """
    components = []
    for members in nx.connected_components(graph.nx_graph):
        nodes = tuple(sorted(members, key=graph.position))
        components.append(Component(nodes=nodes, weight=graph.subgraph_weight(nodes)))
    components.sort(key=lambda c: (-len(c.nodes), -c.weight, graph.position(c.nodes[0])))
    return ComponentPartition(components=components, main=0 if components else None)


class FlaggedCase(NamedTuple):
    case_id: str
    reason: str


def isolate_outliers(
    graph: CoCitationGraph, corpus: Corpus, partition: Optional[ComponentPartition] = None
) -> List[FlaggedCase]:
    """
    Flag judgments whose every cited provision lies outside the main component. Judgments citing nothing are
    never flagged.
    """
    if partition is None:
        partition = connected_components(graph)
    main = partition.main_component
    outliers: List[FlaggedCase] = []
    for judgment in corpus:
        if not judgment.cited or judgment.cited & main:
            continue
        where: Set[int] = set()
        for provision in judgment.cited:
            index = partition.component_of(provision)
            if index is not None:
                where.add(index)
        names = '; '.join(f'component {i + 1} ({partition.components[i].codes})' for i in sorted(where))
        outliers.append(FlaggedCase(judgment.case_id, f'cites only provisions outside the main component: {names}'))
    return outliers


def exclude(corpus: Corpus, case_ids: Iterable[str]) -> Corpus:
    """
    A new corpus without the given judgments. Build the affiliation matrix and projection again afterwards.
    """
    case_ids = list(case_ids)
    remaining = corpus.without(case_ids)
    if case_ids:
        logging.info('Excluded %d judgment(s): %s', len(case_ids), ', '.join(case_ids))
    return remaining


class ExclusionResult(NamedTuple):
    corpus: Corpus
    outliers: List[FlaggedCase]


def exclude_outliers(corpus: Corpus, passes: int = 1) -> ExclusionResult:
    """
    Isolate outliers and exclude them, repeating on the re-projected graph up to ``passes`` times.
    """
    if passes < 1:
        raise ValueError(f'passes must be at least 1, got {passes}')
    flagged: List[FlaggedCase] = []
    for n in range(passes):
        graph = project(build_affiliation(corpus))
        outliers = isolate_outliers(graph, corpus)
        logging.debug('Exclusion pass %d flagged %d judgment(s)', n + 1, len(outliers))
        if not outliers:
            break
        flagged.extend(outliers)
        corpus = exclude(corpus, [o.case_id for o in outliers])
    return ExclusionResult(corpus=corpus, outliers=flagged)
