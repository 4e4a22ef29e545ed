"""
Command line front end: ``cocite ingest | analyze | query | export | stats | reliability``.

Each subcommand reads its inputs from files and writes its artifacts to the output directory, so stages can be
re-run independently. Exit status is 0 on success, 1 for usage errors and 2 for data or I/O errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from typing import Callable
from typing import IO
from typing import List
from typing import NoReturn
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np
import numpy.typing as npt

from . import export
from .affiliation import build_affiliation
from .affiliation import provision_frequency
from .config import CATALOG_FILENAME
from .config import CORPUS_FILENAME
from .config import EXCLUDED_FILENAME
from .config import ExclusionMode
from .config import Format
from .config import parse_date
from .config import parse_exclusion
from .config import parse_formats
from .config import RunConfig
from .corpus import corpus_stats
from .corpus import Corpus
from .corpus import extract_citations
from .corpus import load_catalog
from .corpus import parse_corpus
from .corpus import ProvisionRef
from .corpus import read_records
from .corpus import write_catalog
from .corpus import Window
from .corpus import write_corpus
from .exceptions import CociteError
from .exceptions import EmptyQueryError
from .exceptions import ReliabilityError
from .exceptions import UnknownCaseError
from .exceptions import UnknownProvisionError
from .graph import CoCitationGraph
from .graph import connected_components
from .graph import exclude
from .graph import exclude_outliers
from .graph import FlaggedCase
from .graph import isolate_outliers
from .graph import project
from .metrics import cronbach
from .metrics import metrics_table
from .retrieval import build_index
from .retrieval import classify_case
from .retrieval import court_profiles
from .retrieval import court_similarity
from .retrieval import DEFAULT_K
from .retrieval import METRICS
from .retrieval import Ranking
from .retrieval import search_text
from .retrieval import similar_cases

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

MANUAL_REASON = 'excluded on the command line'


class _UsageError(CociteError):
    ...


class ArgumentParser(argparse.ArgumentParser):
    """
    Reports usage errors with exit status 1 so they stay distinct from data errors.
    """

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f'{self.prog}: error: {message}\n')


def _iso_date(value: str) -> str:
    try:
        return parse_date(value).isoformat()
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f'expected a positive integer, got {value!r}') from None
    if number < 1:
        raise argparse.ArgumentTypeError(f'expected a positive integer, got {value!r}')
    return number


def _formats(*allowed: Format) -> Callable[[str], Tuple[Format, ...]]:
    def parse(value: str) -> Tuple[Format, ...]:
        try:
            return parse_formats(value, allowed)
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e)) from None

    return parse


def _exclusion(value: str) -> Tuple[ExclusionMode, Tuple[str, ...]]:
    try:
        return parse_exclusion(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _add_common(parser: argparse.ArgumentParser, input_help: str) -> None:
    parser.add_argument('--input', help=input_help)
    parser.add_argument('--catalog', help='catalog JSON (default: <out>/catalog.json, else the bundled catalog)')
    parser.add_argument('--out', help='output directory (default: $COCITE_OUT, else ./cocite-out)')


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog='cocite', description='Statute co-citation network analysis of court judgments.')
    parser.add_argument('-v', '--verbose', action='store_true', help='log debug messages')
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True
    corpus_help = f'normalized corpus (default: <out>/{CORPUS_FILENAME})'

    ingest = commands.add_parser('ingest', help='normalize and deduplicate judgment records')
    _add_common(ingest, 'JSON Lines judgment records')
    ingest.add_argument('--from', dest='date_from', type=_iso_date, help='earliest judgment date (inclusive)')
    ingest.add_argument('--to', dest='date_to', type=_iso_date, help='latest judgment date (inclusive)')
    ingest.add_argument('--on-unknown', choices=('reject', 'extend'), default='reject')
    ingest.set_defaults(handler=cmd_ingest)

    analyze = commands.add_parser('analyze', help='project the co-citation graph and compute metrics')
    _add_common(analyze, corpus_help)
    analyze.add_argument('--exclude', type=_exclusion, default=('auto', ()), help='auto, off, or ID,ID,...')
    analyze.add_argument('--passes', type=_positive_int, default=1, help='outlier exclusion passes in auto mode')
    analyze.add_argument('--format', type=_formats('csv', 'text'), default=('csv', 'text'))
    analyze.add_argument('--workers', type=_positive_int, default=1, help='threads for betweenness centrality')
    analyze.set_defaults(handler=cmd_analyze)

    query = commands.add_parser('query', help='rank similar cases or classify a citation set')
    _add_common(query, corpus_help)
    target = query.add_mutually_exclusive_group(required=True)
    target.add_argument('--case', help='case_id of an indexed judgment')
    target.add_argument('--provisions', help='comma separated provisions: short codes or "Law:Article"')
    target.add_argument('--text', help='free text to extract citations from')
    query.add_argument('-k', type=_positive_int, default=DEFAULT_K, help='number of results')
    query.add_argument('--metric', choices=METRICS, default='jaccard')
    query.add_argument('--format', choices=('csv', 'text'), default='text')
    query.add_argument('--exclude', type=_exclusion, default=None, help='auto, off, or ID,ID,...')
    query.set_defaults(handler=cmd_query)

    export_ = commands.add_parser('export', help='write the co-citation graph and affiliation matrix')
    _add_common(export_, corpus_help)
    export_.add_argument('--format', type=_formats('graphml', 'dot', 'csv'), default=('graphml', 'dot', 'csv'))
    export_.add_argument('--exclude', type=_exclusion, default=None, help='auto, off, or ID,ID,...')
    export_.set_defaults(handler=cmd_export)

    stats = commands.add_parser('stats', help='summarize the corpus by procedure, year and court')
    _add_common(stats, corpus_help)
    stats.add_argument('--format', type=_formats('csv', 'text'), default=('text',))
    stats.set_defaults(handler=cmd_stats)

    reliability = commands.add_parser('reliability', help="Cronbach's alpha for an items CSV")
    reliability.add_argument('--input', required=True, help='CSV with a header of item names and one row per case')
    reliability.set_defaults(handler=cmd_reliability)
    return parser


def _config(
    args: argparse.Namespace,
    *,
    window: Optional[Window] = None,
    exclusion: ExclusionMode = 'off',
    excluded_ids: Sequence[str] = (),
    formats: Sequence[Format] = ('csv', 'text'),
    passes: int = 1,
    workers: int = 1,
) -> RunConfig:
    return RunConfig(
        input_path=args.input,
        catalog_path=getattr(args, 'catalog', None),
        out_dir=getattr(args, 'out', None),
        window=window,
        exclusion=exclusion,
        excluded_ids=excluded_ids,
        formats=formats,
        passes=passes,
        workers=workers,
    )


def _load_corpus(config: RunConfig) -> Corpus:
    catalog = load_catalog(config.catalog_path)
    return parse_corpus(read_records(config.input_path), catalog, window=config.window)


def _write_text(config: RunConfig, name: str, text: str) -> None:
    config.artifact(name).write_text(text, encoding='utf-8', newline='\n')


def _write_table(config: RunConfig, name: str, writer: Callable[[IO[str]], None]) -> None:
    with open(config.artifact(name), 'w', encoding='utf-8', newline='') as f:
        writer(f)


def cmd_ingest(args: argparse.Namespace) -> int:
    window: Optional[Window] = None
    if args.date_from or args.date_to:
        start = parse_date(args.date_from) if args.date_from else None
        end = parse_date(args.date_to) if args.date_to else None
        if start is not None and end is not None and start > end:
            raise _UsageError(f'--from {args.date_from} is after --to {args.date_to}')
        window = (start, end)
    if not args.input:
        raise _UsageError('ingest needs --input')
    config = _config(args, window=window)
    catalog = load_catalog(config.catalog_path)
    corpus = parse_corpus(read_records(config.input_path), catalog, window=config.window, on_unknown=args.on_unknown)
    additions = corpus.catalog[len(catalog) :]
    write_corpus(corpus, config.artifact(CORPUS_FILENAME))
    write_catalog(corpus.catalog, config.artifact(CATALOG_FILENAME))
    report = export.render_ingest_report(corpus, str(config.input_path), additions)
    _write_text(config, 'ingest-report.txt', report)
    print(
        f'{len(corpus)} kept, {len(corpus.duplicates.removed)} duplicate(s) removed, {len(corpus.rejects)} rejected'
    )
    if corpus.rejects:
        print(f'{len(corpus.rejects)} warning(s); see {config.out_dir / "ingest-report.txt"}', file=sys.stderr)
    return EXIT_OK


def _saved_exclusions(config: RunConfig, corpus: Corpus) -> Tuple[str, ...]:
    path = config.out_dir / EXCLUDED_FILENAME
    if not path.exists():
        return ()
    with open(path, encoding='utf-8') as f:
        saved = json.load(f)
    if not isinstance(saved, dict):
        raise ValueError(f'{path} must hold a JSON object')
    case_ids = [case_id for case_id in saved.get('case_ids', []) if case_id in corpus]
    logging.info('Applying %d exclusion(s) from %s', len(case_ids), path)
    return tuple(case_ids)


def _apply_exclusion(
    corpus: Corpus, mode: ExclusionMode, case_ids: Sequence[str], passes: int = 1
) -> Tuple[Corpus, List[FlaggedCase]]:
    if mode == 'auto':
        return exclude_outliers(corpus, passes=passes)
    if mode == 'manual':
        return exclude(corpus, case_ids), [FlaggedCase(case_id, MANUAL_REASON) for case_id in case_ids]
    return corpus, []


def _analysis_corpus(args: argparse.Namespace, config: RunConfig, corpus: Corpus) -> Corpus:
    """Corpus after the exclusion named on the command line, else the one ``analyze`` saved."""
    if args.exclude is not None:
        mode, case_ids = args.exclude
        remaining, _ = _apply_exclusion(corpus, mode, case_ids)
        return remaining
    return exclude(corpus, _saved_exclusions(config, corpus))


def _project(corpus: Corpus) -> CoCitationGraph:
    return project(build_affiliation(corpus))


def cmd_analyze(args: argparse.Namespace) -> int:
    mode, case_ids = args.exclude
    config = _config(
        args, exclusion=mode, excluded_ids=case_ids, formats=args.format, passes=args.passes, workers=args.workers
    )
    corpus = _load_corpus(config)
    if not len(corpus):
        print('nothing to analyze: the corpus is empty', file=sys.stderr)
        return EXIT_DATA

    pre_graph = _project(corpus)
    pre_partition = connected_components(pre_graph)
    detected = isolate_outliers(pre_graph, corpus, pre_partition)
    remaining, flagged = _apply_exclusion(corpus, config.exclusion, config.excluded_ids, config.passes)
    excluded = [f.case_id for f in flagged]
    if config.exclusion == 'off':
        flagged = detected
    post_matrix = build_affiliation(remaining)
    post_graph = project(post_matrix)
    post_partition = connected_components(post_graph)

    reports = {
        'pre': metrics_table(pre_graph, workers=config.workers),
        'post': metrics_table(post_graph, workers=config.workers),
    }
    frequency = provision_frequency(post_matrix)
    for stage, report in reports.items():
        if 'csv' in config.formats:
            with open(config.artifact(f'metrics-{stage}.csv'), 'w', encoding='utf-8', newline='') as nodes_f:
                with open(config.artifact(f'metrics-{stage}-overall.csv'), 'w', encoding='utf-8', newline='') as f:
                    export.write_metrics_csv(report, nodes_f, f)
        if 'text' in config.formats:
            _write_text(config, f'metrics-{stage}.txt', export.render_metrics_text(report, f'{stage}-exclusion'))
    if 'csv' in config.formats:
        _write_table(config, 'frequency.csv', lambda f: export.write_frequency_csv(frequency, f))
    if 'text' in config.formats:
        _write_text(config, 'frequency.txt', export.render_frequency_text(frequency))
    components = export.render_components_text(pre_partition, flagged, 'pre-exclusion')
    components += '\n' + export.render_components_text(post_partition, [], 'post-exclusion')
    _write_text(config, 'components.txt', components)
    _write_table(config, 'outliers.csv', lambda f: export.write_outliers_csv(flagged, f))
    saved = {'mode': config.exclusion, 'passes': config.passes, 'case_ids': excluded}
    _write_text(config, EXCLUDED_FILENAME, json.dumps(saved, ensure_ascii=False, indent=2) + '\n')

    for stage, report in reports.items():
        o = report.overall
        print(
            f'{stage}-exclusion: N={o.size} edges={o.edges} arcs={o.arcs} '
            f'density={o.density:.3f} ({report.density_band})'
        )
    print(f'{len(pre_partition.components)} component(s) before exclusion; {len(excluded)} judgment(s) excluded')
    return EXIT_OK


def _parse_provisions(corpus: Corpus, value: str) -> List[ProvisionRef]:
    provisions: List[ProvisionRef] = []
    unknown: List[str] = []
    for token in value.split(','):
        if not token.strip():
            continue
        try:
            provisions.append(corpus.catalog.lookup(token))
        except UnknownProvisionError:
            unknown.append(token.strip())
    if unknown:
        raise UnknownProvisionError(unknown)
    if not provisions:
        raise EmptyQueryError('--provisions names no provision')
    return provisions


def _print_ranking(ranking: Ranking, fmt: str) -> None:
    if fmt == 'csv':
        export.write_ranking_csv(ranking, sys.stdout)
    else:
        sys.stdout.write(export.render_ranking_text(ranking))


def cmd_query(args: argparse.Namespace) -> int:
    config = _config(args, formats=(args.format,))
    corpus = _analysis_corpus(args, config, _load_corpus(config))
    graph = _project(corpus)
    index = build_index(corpus, graph, connected_components(graph))
    verdict_out = sys.stderr if args.format == 'csv' else sys.stdout
    if args.case is not None:
        cited = corpus.get(args.case).cited
        verdict = classify_case(index, cited) if cited else None
        ranking = similar_cases(index, args.case, k=args.k, metric=args.metric)
    elif args.provisions is not None:
        provisions = _parse_provisions(corpus, args.provisions)
        verdict = classify_case(index, provisions)
        ranking = similar_cases(index, frozenset(provisions), k=args.k, metric=args.metric)
    else:
        ranking = search_text(index, args.text, k=args.k, metric=args.metric)
        verdict = classify_case(index, extract_citations(args.text, corpus.catalog))
    if verdict is not None:
        verdict_out.write(export.render_classification(verdict))
    _print_ranking(ranking, args.format)
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    config = _config(args, formats=args.format)
    corpus = _analysis_corpus(args, config, _load_corpus(config))
    matrix = build_affiliation(corpus)
    graph = project(matrix)
    for fmt in args.format:
        path = export.export_graph(graph, fmt, config.artifact(export.GRAPH_FILENAMES[fmt]))
        logging.info('Wrote %s', path)
    _write_table(config, 'affiliation.csv', matrix.to_csv)
    print(f'exported N={graph.size} edges={graph.edge_count} to {config.out_dir}')
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    config = _config(args, formats=args.format)
    corpus = _load_corpus(config)
    stats = corpus_stats(corpus)
    if 'text' in args.format:
        profiles = court_profiles(corpus)
        sys.stdout.write(export.render_stats_text(stats))
        sys.stdout.write('\n' + export.render_courts_text(profiles, court_similarity(profiles)))
    if 'csv' in args.format:
        export.write_stats_csv(stats, sys.stdout)
    return EXIT_OK


def read_items(path: str) -> Tuple[List[str], npt.NDArray[np.float64]]:
    with open(path, encoding='utf-8', newline='') as f:
        rows = [row for row in csv.reader(f) if any(cell.strip() for cell in row)]
    if not rows:
        raise ReliabilityError(f'{path} is empty')
    names = [name.strip() for name in rows[0]]
    scores: List[List[float]] = []
    for n, row in enumerate(rows[1:], start=2):
        if len(row) != len(names):
            raise ReliabilityError(f'{path}, line {n}: expected {len(names)} values, got {len(row)}')
        try:
            scores.append([float(cell) for cell in row])
        except ValueError:
            raise ReliabilityError(f'{path}, line {n}: scores must be numbers') from None
    return names, np.array(scores, dtype=np.float64).reshape(len(scores), len(names))


def cmd_reliability(args: argparse.Namespace) -> int:
    names, scores = read_items(args.input)
    report = cronbach(scores, names)
    sys.stdout.write(export.render_reliability_text(report))
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING, format='%(levelname)s %(name)s: %(message)s'
    )
    logging.captureWarnings(True)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except (_UsageError, UnknownProvisionError, UnknownCaseError, EmptyQueryError) as e:
        print(f'cocite {args.command}: error: {e}', file=sys.stderr)
        return EXIT_USAGE
    except (CociteError, OSError, ValueError) as e:
        print(f'cocite {args.command}: error: {e}', file=sys.stderr)
        return EXIT_DATA
