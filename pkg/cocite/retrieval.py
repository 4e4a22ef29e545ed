"""
Similar-case retrieval over citation sets, and type classification against the main co-citation component.
"""
from __future__ import annotations

import datetime
import itertools
import math
import sys
from typing import AbstractSet
from typing import Callable
from typing import Dict
from typing import FrozenSet
from typing import Iterable
from typing import List
from typing import Literal
from typing import Mapping
from typing import NamedTuple
from typing import Tuple
from typing import Union

if sys.version_info < (3, 10):
    from typing_extensions import TypeAlias
else:
    from typing import TypeAlias

from .corpus import Catalog
from .corpus import Corpus
from .corpus import extract_citations
from .corpus import ProvisionRef
from .exceptions import EmptyQueryError
from .exceptions import UnknownCaseError
from .exceptions import UnknownProvisionError
from .graph import CoCitationGraph
from .graph import ComponentPartition

Metric: TypeAlias = Literal['jaccard', 'cosine']

DEFAULT_K = 10
METRICS: Tuple[Metric, ...] = ('jaccard', 'cosine')


def jaccard(a: AbstractSet[ProvisionRef], b: AbstractSet[ProvisionRef]) -> float:
    union = len(a | b)
    if not union:
        return 0.0
    return len(a & b) / union


def cosine(a: AbstractSet[ProvisionRef], b: AbstractSet[ProvisionRef]) -> float:
    if not a or not b:
        return 0.0
    return len(a & b) / math.sqrt(len(a) * len(b))


_SCORERS: Dict[str, Callable[[AbstractSet[ProvisionRef], AbstractSet[ProvisionRef]], float]] = {
    'jaccard': jaccard,
    'cosine': cosine,
}


def _scorer(metric: str) -> Callable[[AbstractSet[ProvisionRef], AbstractSet[ProvisionRef]], float]:
    try:
        return _SCORERS[metric]
    except KeyError:
        raise ValueError(f'Invalid metric: {metric!r}. Expected one of {", ".join(METRICS)}') from None


class CaseInfo(NamedTuple):
    court: str
    date: datetime.date


class RetrievalIndex:
    """
    Citation vectors of every indexed judgment plus the main component they are classified against.
    Built once from a corpus and never updated in place.
    """

    def __init__(self, corpus: Corpus, graph: CoCitationGraph, partition: ComponentPartition):
        self._catalog: Catalog = corpus.catalog
        self._vectors: Dict[str, FrozenSet[ProvisionRef]] = {j.case_id: j.cited for j in corpus}
        self._info: Dict[str, CaseInfo] = {j.case_id: CaseInfo(j.court, j.date) for j in corpus}
        self._graph: CoCitationGraph = graph
        self._main: FrozenSet[ProvisionRef] = partition.main_component

    @property
    def vectors(self) -> Mapping[str, FrozenSet[ProvisionRef]]:
        return dict(self._vectors)

    @property
    def catalog(self) -> Catalog:
        return self._catalog

    @property
    def graph(self) -> CoCitationGraph:
        return self._graph

    @property
    def main_component(self) -> FrozenSet[ProvisionRef]:
        return self._main

    def info(self, case_id: str) -> CaseInfo:
        try:
            return self._info[case_id]
        except KeyError:
            raise UnknownCaseError([case_id]) from None

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, case_id: object) -> bool:
        return case_id in self._vectors

    def __repr__(self) -> str:
        return f'<{self.__class__.__qualname__} cases={len(self._vectors)} main={len(self._main)}>'


def build_index(corpus: Corpus, graph: CoCitationGraph, partition: ComponentPartition) -> RetrievalIndex:
    return RetrievalIndex(corpus, graph, partition)


class RankedCase(NamedTuple):
    case_id: str
    score: float
    court: str
    date: datetime.date


class Ranking(NamedTuple):
    entries: List[RankedCase]
    metric: Metric


def similar_cases(
    index: RetrievalIndex,
    query: Union[AbstractSet[ProvisionRef], str],
    k: int = DEFAULT_K,
    metric: Metric = 'jaccard',
) -> Ranking:
    """
    Rank indexed judgments by citation-set similarity to ``query``: a set of provisions, or the case_id of an
    indexed judgment (which is then left out of its own results).

    Scores are non-increasing; ties go to the smaller case_id. ``k`` larger than the index returns everything.
    """
    score = _scorer(metric)
    if k < 0:
        raise ValueError(f'k must not be negative, got {k}')
    vectors = index.vectors
    exclude = None
    if isinstance(query, str):
        if query not in vectors:
            raise UnknownCaseError([query])
        exclude = query
        vector = vectors[query]
    else:
        vector = frozenset(query)
    if not vector:
        raise EmptyQueryError('query must cite at least one provision')
    scored = [
        (score(vector, cited), case_id) for case_id, cited in vectors.items() if case_id != exclude
    ]
    scored.sort(key=lambda item: (-item[0], item[1]))
    entries = [RankedCase(case_id, s, *index.info(case_id)) for s, case_id in scored[:k]]
    return Ranking(entries=entries, metric=metric)


def search_text(index: RetrievalIndex, raw_text: str, k: int = DEFAULT_K, metric: Metric = 'jaccard') -> Ranking:
    """
    Rank similar cases for free text by first extracting the catalog provisions it cites.
    """
    cited = extract_citations(raw_text, index.catalog)
    if not cited:
        raise EmptyQueryError('no catalog provision is cited in the query text')
    return similar_cases(index, cited, k=k, metric=metric)


class InType(NamedTuple):
    overlap: float


class Outlier(NamedTuple):
    reason: str
    disjoint: Tuple[ProvisionRef, ...]


Classification: TypeAlias = Union[InType, Outlier]


def classify_case(index: RetrievalIndex, citations: Iterable[ProvisionRef]) -> Classification:
    """
    In-type when the citations touch the main component, with ``overlap`` the share of citations inside it;
    otherwise an outlier naming the provisions that lie outside.
    """
    cited = frozenset(citations)
    if not cited:
        raise EmptyQueryError('citations must not be empty')
    unknown = sorted(p.label for p in cited if p not in index.catalog)
    if unknown:
        raise UnknownProvisionError(unknown)
    inside = cited & index.main_component
    if inside:
        return InType(overlap=len(inside) / len(cited))
    disjoint = tuple(sorted(cited, key=index.catalog.position))
    reason = 'no cited provision belongs to the main component: ' + ', '.join(p.display for p in disjoint)
    return Outlier(reason=reason, disjoint=disjoint)


class CourtProfile(NamedTuple):
    cases: int
    shares: Dict[ProvisionRef, float]

    @property
    def cited(self) -> FrozenSet[ProvisionRef]:
        return frozenset(self.shares)


def court_profiles(corpus: Corpus) -> Dict[str, CourtProfile]:
    """
    For each court, the share of its judgments citing each provision (catalog order, uncited omitted).
    """
    by_court: Dict[str, List[FrozenSet[ProvisionRef]]] = {}
    for judgment in corpus:
        by_court.setdefault(judgment.court, []).append(judgment.cited)
    profiles: Dict[str, CourtProfile] = {}
    for court in sorted(by_court):
        cited_sets = by_court[court]
        shares = {
            p: sum(p in cited for cited in cited_sets) / len(cited_sets)
            for p in corpus.catalog
            if any(p in cited for cited in cited_sets)
        }
        profiles[court] = CourtProfile(cases=len(cited_sets), shares=shares)
    return profiles


def court_similarity(
    profiles: Mapping[str, CourtProfile], metric: Metric = 'jaccard'
) -> Dict[Tuple[str, str], float]:
    """
    Pairwise similarity of the provision sets each court relies on.
    """
    score = _scorer(metric)
    return {
        (a, b): score(profiles[a].cited, profiles[b].cited) for a, b in itertools.combinations(sorted(profiles), 2)
    }
