"""
File renderers: graph exports (GraphML, DOT, CSV edge list) and the CSV / plain-text report tables.

Every renderer is byte-stable: identical inputs give identical output.
"""
from __future__ import annotations

import csv
import functools
import io
import os
import pathlib
import sys
from typing import Any
from typing import Dict
from typing import IO
from typing import Iterable
from typing import List
from typing import Literal
from typing import Mapping
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import networkx as nx
from jinja2 import BaseLoader
from jinja2 import Environment
from jinja2 import Template

if sys.version_info < (3, 10):
    from typing_extensions import TypeAlias
else:
    from typing import TypeAlias

from .affiliation import Frequency
from .corpus import Corpus
from .corpus import CorpusStats
from .corpus import PROCEDURES
from .corpus import ProvisionRef
from .exceptions import UnsupportedFormatError
from .graph import CoCitationGraph
from .graph import ComponentPartition
from .graph import FlaggedCase
from .metrics import MetricsReport
from .metrics import ReliabilityReport
from .metrics import round_half_away
from .retrieval import Classification
from .retrieval import CourtProfile
from .retrieval import InType
from .retrieval import Ranking

GraphFormat: TypeAlias = Literal['graphml', 'dot', 'csv']
GRAPH_FORMATS: Tuple[GraphFormat, ...] = ('graphml', 'dot', 'csv')
GRAPH_FILENAMES: Dict[str, str] = {'graphml': 'graph.graphml', 'dot': 'graph.dot', 'csv': 'edges.csv'}

_TEMPLATE_DIR = pathlib.Path(__file__).parent / 'templates'


def _dot_quote(value: Any) -> str:
    return str(value).replace('\\', '\\\\').replace('"', '\\"')


@functools.lru_cache(maxsize=None)
def _template(name: str) -> Template:
    env = Environment(loader=BaseLoader(), autoescape=False)
    env.filters['dotq'] = _dot_quote
    template_string = (_TEMPLATE_DIR / name).read_text(encoding='utf-8')
    return env.from_string(template_string)


def render(name: str, **context: Any) -> str:
    ret = _template(name).render(**context)
    assert isinstance(ret, str)
    return ret


def _fmt(value: float) -> str:
    return f'{round_half_away(value):.3f}'


def _cases(graph: CoCitationGraph, u: ProvisionRef, v: ProvisionRef) -> str:
    return ';'.join(sorted(graph.provenance(u, v)))


def to_networkx(graph: CoCitationGraph) -> nx.Graph:
    """
    Plain graph keyed by display code with scalar attributes only, suitable for GraphML.
    """
    g = nx.Graph()
    for node in graph.nodes:
        g.add_node(node.display, label=node.label, law=node.law_name, article=node.article, status=node.status)
    for u, v in graph.edges:
        g.add_edge(u.display, v.display, weight=graph.weight(u, v), cases=_cases(graph, u, v))
    return g


def render_dot(graph: CoCitationGraph) -> str:
    nodes = [{'id': node.display, 'label': node.label} for node in graph.nodes]
    edges = [{'u': u.display, 'v': v.display, 'weight': graph.weight(u, v)} for u, v in graph.edges]
    # the template loader drops the final newline
    return render('graph.dot.j2', nodes=nodes, edges=edges) + '\n'


def write_edges_csv(graph: CoCitationGraph, f: IO[str]) -> None:
    writer = csv.writer(f, lineterminator='\n')
    writer.writerow(['source', 'target', 'weight', 'cases'])
    for u, v in graph.edges:
        writer.writerow([u.display, v.display, graph.weight(u, v), _cases(graph, u, v)])
    return None


def export_graph(graph: CoCitationGraph, fmt: str, path: Union[str, 'os.PathLike[str]']) -> pathlib.Path:
    """
    Write ``graph`` as GraphML (weight and cases attributes), DOT (weight labels) or a CSV edge list.
    """
    path = pathlib.Path(path)
    if fmt == 'graphml':
        buffer = io.BytesIO()
        nx.write_graphml(to_networkx(graph), buffer, encoding='utf-8', prettyprint=True)
        path.write_bytes(buffer.getvalue())
    elif fmt == 'dot':
        path.write_text(render_dot(graph), encoding='utf-8', newline='\n')
    elif fmt == 'csv':
        with open(path, 'w', encoding='utf-8', newline='') as f:
            write_edges_csv(graph, f)
    else:
        raise UnsupportedFormatError(f'Unsupported graph format: {fmt!r}. Expected one of {", ".join(GRAPH_FORMATS)}')
    return path


def render_table(
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    *,
    title: str = '',
    align: Optional[Sequence[str]] = None,
    notes: Sequence[str] = (),
) -> str:
    cells: List[List[str]] = [[str(c) for c in header]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    if align is None:
        align = ['<'] * len(header)
    rule = sum(widths) + 2 * (len(widths) - 1)
    return render('table.txt.j2', title=title, rows=cells, widths=widths, align=align, rule=rule, notes=notes)


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], f: IO[str]) -> None:
    writer = csv.writer(f, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    return None


_NODE_HEADER = ('Legal Provisions', 'Serial Number', 'Degree', 'Betweenness Centrality')
_OVERALL_HEADER = ('Metric', 'Value')


def _node_rows(report: MetricsReport) -> List[Tuple[str, str, int, str]]:
    return [(m.provision.label, m.provision.short_code or '', m.degree, _fmt(m.betweenness)) for m in report.per_node]


def _overall_rows(report: MetricsReport) -> List[Tuple[str, Any]]:
    o = report.overall
    return [
        ('Density', _fmt(o.density)),
        ('Density Band', report.density_band),
        ('Number of Arcs', o.arcs),
        ('Number of Edges', o.edges),
        ('Number of Nodes', o.size),
    ]


def write_metrics_csv(report: MetricsReport, nodes_f: IO[str], overall_f: IO[str]) -> None:
    write_csv(_NODE_HEADER, _node_rows(report), nodes_f)
    write_csv(_OVERALL_HEADER, _overall_rows(report), overall_f)
    return None


def render_metrics_text(report: MetricsReport, stage: str) -> str:
    nodes = render_table(
        _NODE_HEADER,
        _node_rows(report),
        title=f'Degree and betweenness centrality ({stage})',
        align=('<', '<', '>', '>'),
    )
    overall = render_table(
        _OVERALL_HEADER,
        _overall_rows(report),
        title=f'Overall metrics ({stage})',
        align=('<', '>'),
        notes=('Arcs count each tie in both directions; density uses undirected edges.',),
    )
    return nodes + '\n' + overall


_FREQUENCY_HEADER = ('Legal Provisions', 'Serial Number', 'Judgments', 'Share')


def _frequency_rows(frequency: Mapping[ProvisionRef, Frequency]) -> List[Tuple[str, str, int, str]]:
    return [(p.label, p.short_code or '', f.count, _fmt(f.fraction)) for p, f in frequency.items()]


def write_frequency_csv(frequency: Mapping[ProvisionRef, Frequency], f: IO[str]) -> None:
    write_csv(_FREQUENCY_HEADER, _frequency_rows(frequency), f)


def render_frequency_text(frequency: Mapping[ProvisionRef, Frequency]) -> str:
    return render_table(
        _FREQUENCY_HEADER, _frequency_rows(frequency), title='Citation frequency', align=('<', '<', '>', '>')
    )


def render_components_text(partition: ComponentPartition, outliers: Sequence[FlaggedCase], stage: str) -> str:
    return render('components.txt.j2', partition=partition, outliers=outliers, stage=stage)


def write_outliers_csv(outliers: Sequence[FlaggedCase], f: IO[str]) -> None:
    write_csv(('case_id', 'reason'), outliers, f)


_RANKING_HEADER = ('score', 'case_id', 'court', 'date')


def _ranking_rows(ranking: Ranking) -> List[Tuple[str, str, str, str]]:
    return [(_fmt(e.score), e.case_id, e.court, e.date.isoformat()) for e in ranking.entries]


def write_ranking_csv(ranking: Ranking, f: IO[str]) -> None:
    write_csv(_RANKING_HEADER, _ranking_rows(ranking), f)


def render_ranking_text(ranking: Ranking) -> str:
    return render_table(
        _RANKING_HEADER, _ranking_rows(ranking), title=f'Similar cases ({ranking.metric})', align=('>', '<', '<', '<')
    )


def render_classification(verdict: Classification) -> str:
    if isinstance(verdict, InType):
        return f'in_type (overlap {_fmt(verdict.overlap)})\n'
    return f'outlier: {verdict.reason}\n'


_STATS_HEADER = ('Year', 'Judgments', 'Summary share')


def _stats_rows(stats: CorpusStats) -> List[Tuple[int, int, str]]:
    return [(year, y.count, _fmt(y.summary_fraction)) for year, y in stats.by_year.items()]


def write_stats_csv(stats: CorpusStats, f: IO[str]) -> None:
    write_csv(_STATS_HEADER, _stats_rows(stats), f)


def render_stats_text(stats: CorpusStats) -> str:
    by_year = render_table(_STATS_HEADER, _stats_rows(stats), title='Judgments by year', align=('<', '>', '>'))
    by_procedure = render_table(
        ('Procedure', 'Judgments'),
        [(p, stats.by_procedure[p]) for p in PROCEDURES],
        title='Judgments by procedure',
        align=('<', '>'),
        notes=(f'Total: {stats.total}',),
    )
    return by_year + '\n' + by_procedure


def render_reliability_text(report: ReliabilityReport) -> str:
    rows = [
        (name, _fmt(citc), '-' if deleted is None else _fmt(deleted), _fmt(report.alpha_raw))
        for name, citc, deleted in zip(report.items, report.citc, report.alpha_if_deleted)
    ]
    return render_table(
        ('Name', 'Corrected Item-Total Correlation (CITC)', "Cronbach's alpha if Item Deleted", "Cronbach's alpha"),
        rows,
        title=f'Cronbach reliability ({report.n} cases, {report.k} items)',
        align=('<', '>', '>', '>'),
        notes=(f"Standardized Cronbach's alpha = {_fmt(report.alpha_standardized)}",),
    )


def render_ingest_report(corpus: Corpus, source: str, additions: Sequence[ProvisionRef] = ()) -> str:
    window = ''
    if corpus.window is not None:
        start, end = corpus.window
        window = f'{start.isoformat() if start else "..."} to {end.isoformat() if end else "..."}'
    return render(
        'ingest.txt.j2',
        source=source,
        kept=len(corpus),
        removed=corpus.duplicates.removed,
        rejects=corpus.rejects,
        suspected=corpus.duplicates.suspected,
        window=window,
        additions=[p.label for p in additions],
    )


def render_courts_text(profiles: Mapping[str, CourtProfile], similarity: Mapping[Tuple[str, str], float]) -> str:
    courts = render_table(
        ('Court', 'Judgments', 'Provisions cited'),
        [(court, profile.cases, len(profile.shares)) for court, profile in profiles.items()],
        title='Courts',
        align=('<', '>', '>'),
    )
    if not similarity:
        return courts
    pairs = render_table(
        ('Court', 'Court', 'Similarity'),
        [(a, b, _fmt(score)) for (a, b), score in similarity.items()],
        title='Similarity of cited provision sets between courts',
        align=('<', '<', '>'),
    )
    return courts + '\n' + pairs
