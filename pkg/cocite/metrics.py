from __future__ import annotations

import decimal
import itertools
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Dict
from typing import Iterator
from typing import List
from typing import Literal
from typing import NamedTuple
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import networkx as nx
import numpy as np
import numpy.typing as npt

if sys.version_info < (3, 10):
    from typing_extensions import TypeAlias
else:
    from typing import TypeAlias

from .corpus import ProvisionRef
from .exceptions import ReliabilityError
from .exceptions import UnknownProvisionError
from .graph import CoCitationGraph

DensityBand: TypeAlias = Literal['sparse', 'dense']

SPARSE_DENSITY_THRESHOLD = 0.25


def round_half_away(value: float, places: int = 3) -> float:
    """
    Round to ``places`` decimals with ties away from zero, so golden tables are stable across platforms.
    """
    exponent = decimal.Decimal(1).scaleb(-places)
    return float(decimal.Decimal(repr(value)).quantize(exponent, rounding=decimal.ROUND_HALF_UP))


def degree(graph: CoCitationGraph, node: ProvisionRef) -> int:
    """
    Number of distinct neighbors; edge weights are ignored.
    """
    if node not in graph:
        raise UnknownProvisionError([node.label])
    return int(graph.nx_graph.degree[node])


def _chunks(nodes: Sequence[ProvisionRef], n: int) -> Iterator[Tuple[ProvisionRef, ...]]:
    it = iter(nodes)
    while True:
        chunk = tuple(itertools.islice(it, n))
        if not chunk:
            return
        yield chunk


def betweenness(graph: CoCitationGraph, workers: int = 1) -> Dict[ProvisionRef, float]:
    """
    Unnormalized betweenness centrality on the dichotomized graph.

    For each node i this is the sum, over unordered pairs (j, k) with j, k != i, of the share of j-k geodesics
    passing through i. Pairs in different components contribute nothing.

    :param workers: when greater than 1, sources are split into contiguous chunks (catalog order) evaluated on a
        thread pool; partial sums are always reduced in chunk order so the result does not depend on scheduling.
    """
    g = graph.nx_graph
    if workers <= 1 or graph.size < 3:
        raw = nx.betweenness_centrality(g, normalized=False, weight=None, endpoints=False)
        return {node: float(raw[node]) for node in graph.nodes}
    nodes = graph.nodes
    chunk_size = max(1, -(-len(nodes) // (workers * 4)))
    chunks = list(_chunks(nodes, chunk_size))
    targets = list(nodes)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(nx.betweenness_centrality_subset, g, chunk, targets, normalized=False, weight=None)
            for chunk in chunks
        ]
        partials = [fut.result() for fut in futures]
    logging.debug('Reduced betweenness over %d chunks', len(partials))
    total: Dict[ProvisionRef, float] = {node: 0.0 for node in nodes}
    for partial in partials:
        for node in nodes:
            total[node] += float(partial[node])
    return total


def density(graph: CoCitationGraph) -> float:
    """
    D = 2L / (g (g - 1)) over undirected edges; 0 when fewer than two nodes.
    """
    if graph.size < 2:
        return 0.0
    return float(nx.density(graph.nx_graph))


def size(graph: CoCitationGraph) -> int:
    return graph.size


def density_band(value: float) -> DensityBand:
    return 'sparse' if value <= SPARSE_DENSITY_THRESHOLD else 'dense'


class NodeMetrics(NamedTuple):
    provision: ProvisionRef
    degree: int
    betweenness: float


class OverallMetrics(NamedTuple):
    size: int
    arcs: int
    edges: int
    density: float


class MetricsReport(NamedTuple):
    per_node: List[NodeMetrics]
    overall: OverallMetrics
    density_band: DensityBand


def metrics_table(graph: CoCitationGraph, workers: int = 1) -> MetricsReport:
    """
    Per-node degree and betweenness (catalog order) plus size, arcs (sum of degrees), undirected edges and density.
    """
    scores = betweenness(graph, workers=workers)
    per_node = [NodeMetrics(node, degree(graph, node), scores[node]) for node in graph.nodes]
    arcs = sum(m.degree for m in per_node)
    edges = graph.edge_count
    assert arcs == 2 * edges, 'handshake lemma violated'
    d = density(graph)
    overall = OverallMetrics(size=graph.size, arcs=arcs, edges=edges, density=d)
    return MetricsReport(per_node=per_node, overall=overall, density_band=density_band(d))


def argmax_nodes(values: Dict[ProvisionRef, Union[int, float]]) -> List[ProvisionRef]:
    if not values:
        return []
    best = max(values.values())
    return [node for node, value in values.items() if value == best]


class ReliabilityReport(NamedTuple):
    k: int
    n: int
    alpha_raw: float
    alpha_standardized: float
    mean_r: float
    citc: List[float]
    alpha_if_deleted: List[Optional[float]]
    items: List[str]


def standardized_alpha(k: int, mean_r: float) -> float:
    """
    Standardized Cronbach's alpha from the item count and the mean inter-item correlation.
    """
    if k < 2:
        raise ReliabilityError(f'Cronbach alpha needs at least 2 items, got {k}')
    return k * mean_r / (1 + (k - 1) * mean_r)


def _alpha_raw(scores: npt.NDArray[np.float64]) -> float:
    k = scores.shape[1]
    item_var = scores.var(axis=0, ddof=1)
    total_var = scores.sum(axis=1).var(ddof=1)
    if total_var == 0:
        raise ReliabilityError('total score variance is zero')
    return float(k / (k - 1) * (1 - item_var.sum() / total_var))


def cronbach(items: npt.ArrayLike, names: Optional[Sequence[str]] = None) -> ReliabilityReport:
    """
    Cronbach's alpha for a cases x items score matrix.

    Variances are sample variances (divisor n - 1) and correlations are Pearson. ``citc`` holds each item's
    correlation with the sum of the other items; ``alpha_if_deleted`` is None when only two items exist.
    """
    scores = np.asarray(items, dtype=np.float64)
    if scores.ndim != 2:
        raise ReliabilityError(f'expected a 2-D cases x items matrix, got {scores.ndim} dimension(s)')
    n, k = scores.shape
    if k < 2:
        raise ReliabilityError(f'Cronbach alpha needs at least 2 items, got {k}')
    if n < 2:
        raise ReliabilityError(f'Cronbach alpha needs at least 2 cases, got {n}')
    if not np.all(np.isfinite(scores)):
        raise ReliabilityError('scores must be finite numbers')
    item_var = scores.var(axis=0, ddof=1)
    flat = [i for i in range(k) if item_var[i] == 0]
    if flat:
        raise ReliabilityError(f'zero variance in item(s) {", ".join(str(i + 1) for i in flat)}')
    if names is None:
        names = [f'Item {i + 1}' for i in range(k)]
    if len(names) != k:
        raise ReliabilityError(f'{len(names)} item names given for {k} items')

    alpha_raw = _alpha_raw(scores)
    corr = np.corrcoef(scores, rowvar=False)
    mean_r = float(corr[np.triu_indices(k, 1)].mean())
    total = scores.sum(axis=1)
    citc: List[float] = []
    for i in range(k):
        rest = total - scores[:, i]
        if rest.var(ddof=1) == 0:
            raise ReliabilityError(f'the items other than item {i + 1} sum to a constant')
        citc.append(float(np.corrcoef(scores[:, i], rest)[0, 1]))
    alpha_if_deleted: List[Optional[float]] = []
    for i in range(k):
        if k == 2:
            alpha_if_deleted.append(None)
        else:
            alpha_if_deleted.append(_alpha_raw(np.delete(scores, i, axis=1)))
    return ReliabilityReport(
        k=k,
        n=n,
        alpha_raw=alpha_raw,
        alpha_standardized=standardized_alpha(k, mean_r),
        mean_r=mean_r,
        citc=citc,
        alpha_if_deleted=alpha_if_deleted,
        items=list(names),
    )
