"""
Judgment records, the provision catalog they cite, and the ingestion pipeline that ties them together.
"""
from __future__ import annotations

import datetime
import json
import logging
import os
import pathlib
import re
import sys
import warnings
from typing import Any
from typing import Dict
from typing import FrozenSet
from typing import IO
from typing import Iterable
from typing import Iterator
from typing import List
from typing import Literal
from typing import Mapping
from typing import NamedTuple
from typing import Optional
from typing import overload
from typing import Sequence
from typing import Tuple
from typing import Union

if sys.version_info < (3, 10):
    from typing_extensions import TypeAlias
else:
    from typing import TypeAlias

from .exceptions import CociteWarning
from .exceptions import RecordError
from .exceptions import UnknownCaseError
from .exceptions import UnknownProvisionError

Procedure: TypeAlias = Literal['summary', 'small_claims', 'ordinary', 'unknown']
Status: TypeAlias = Literal['in_force', 'invalidated']
OnUnknown: TypeAlias = Literal['reject', 'extend']
Window: TypeAlias = Tuple[Optional[datetime.date], Optional[datetime.date]]
PathLike: TypeAlias = Union[str, 'os.PathLike[str]']

PROCEDURES: Tuple[Procedure, ...] = ('summary', 'small_claims', 'ordinary', 'unknown')
STATUSES: Tuple[Status, ...] = ('in_force', 'invalidated')

_DATA_DIR = pathlib.Path(__file__).parent / 'data'
BUNDLED_CATALOG = _DATA_DIR / 'catalog.json'
BUNDLED_JUDGMENTS = _DATA_DIR / 'judgments.jsonl'

_FOLD_TABLE = str.maketrans({'’': "'", '‘': "'", '“': '"', '”': '"', '，': ',', '　': ' ', '《': None, '》': None})
_WHITESPACE = re.compile(r'\s+')
_NON_WORD = re.compile(r'[\W_]+')


def fold(text: str) -> str:
    """
    Normalize text for matching: straight quotes, ASCII commas, no book-title marks, single spaces, casefolded.
    """
    return _WHITESPACE.sub(' ', text.translate(_FOLD_TABLE)).strip().casefold()


def fold_title(title: str) -> str:
    return _NON_WORD.sub('', fold(title))


class ProvisionRef:
    """
    One cited statutory article. Identity is ``(law_name, article)``; everything else is descriptive.

    An invalidated provision and its successor are separate nodes; ``successor`` is only a cross-reference.
    """

    def __init__(
        self,
        law_name: str,
        article: int,
        *,
        status: Status = 'in_force',
        successor: Optional[ProvisionRef] = None,
        short_code: Optional[str] = None,
        aliases: Sequence[str] = (),
        effective: Optional[datetime.date] = None,
        subject: str = '',
    ):
        if not isinstance(law_name, str) or not law_name.strip():
            raise ValueError('law_name must be a non-empty string')
        if isinstance(article, bool) or not isinstance(article, int) or article < 1:
            raise ValueError(f'article must be a positive integer, got {article!r}')
        if status not in STATUSES:
            raise ValueError(f'Invalid status: {status!r}')
        self._law_name: str = law_name.strip()
        self._article: int = article
        self.status: Status = status
        self.successor: Optional[ProvisionRef] = successor
        self.short_code: Optional[str] = short_code
        self.aliases: Tuple[str, ...] = tuple(aliases)
        self.effective: Optional[datetime.date] = effective
        self.subject: str = subject

    @property
    def law_name(self) -> str:
        return self._law_name

    @property
    def article(self) -> int:
        return self._article

    @property
    def key(self) -> Tuple[str, int]:
        return (self._law_name, self._article)

    @property
    def label(self) -> str:
        return f'{self._law_name}, Art.{self._article}'

    @property
    def display(self) -> str:
        return self.short_code or self.label

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProvisionRef):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}(law_name={self._law_name!r}, article={self._article!r})'

    def to_json(self) -> Dict[str, Any]:
        ret: Dict[str, Any] = {'law': self._law_name, 'article': self._article, 'status': self.status}
        if self.successor is not None:
            ret['successor'] = {'law': self.successor.law_name, 'article': self.successor.article}
        if self.short_code is not None:
            ret['short_code'] = self.short_code
        if self.effective is not None:
            ret['effective'] = self.effective.isoformat()
        if self.subject:
            ret['subject'] = self.subject
        ret['patterns'] = list(self.aliases)
        return ret


_ARTICLE_SUFFIX = r'(?:\s*,?\s*(?:art\.?|article)\s*{n}|\s*第\s*{n}\s*条)(?!\d)'


class Catalog(Sequence[ProvisionRef]):
    """
    The ordered provision catalog. Order is significant: matrix rows, tables and tie-breaks follow it.
    """

    def __init__(self, provisions: Iterable[ProvisionRef]):
        self._provisions: Tuple[ProvisionRef, ...] = tuple(provisions)
        self._index: Dict[ProvisionRef, int] = {}
        self._by_code: Dict[str, ProvisionRef] = {}
        self._laws: Dict[str, str] = {}
        for i, provision in enumerate(self._provisions):
            if provision in self._index:
                raise ValueError(f'Duplicate catalog entry: {provision.label!r}')
            self._index[provision] = i
            if provision.short_code is not None:
                if provision.short_code in self._by_code:
                    raise ValueError(f'Duplicate short code: {provision.short_code!r}')
                self._by_code[provision.short_code] = provision
            for name in (provision.law_name, *provision.aliases):
                folded = fold(name)
                existing = self._laws.setdefault(folded, provision.law_name)
                if existing != provision.law_name:
                    raise ValueError(f'Alias {name!r} names both {existing!r} and {provision.law_name!r}')
        self._pattern: Optional[re.Pattern[str]] = None
        self._groups: Dict[str, ProvisionRef] = {}

    @overload
    def __getitem__(self, item: int) -> ProvisionRef:
        ...

    @overload
    def __getitem__(self, item: slice) -> Tuple[ProvisionRef, ...]:
        ...

    def __getitem__(self, item: Union[int, slice]) -> Union[ProvisionRef, Tuple[ProvisionRef, ...]]:
        return self._provisions[item]

    def __len__(self) -> int:
        return len(self._provisions)

    def __iter__(self) -> Iterator[ProvisionRef]:
        return iter(self._provisions)

    def __contains__(self, item: object) -> bool:
        return item in self._index

    def __repr__(self) -> str:
        return f'<{self.__class__.__qualname__} size={len(self._provisions)}>'

    def position(self, provision: ProvisionRef) -> int:
        try:
            return self._index[provision]
        except KeyError:
            raise UnknownProvisionError([provision.label]) from None

    def resolve_law(self, name: str) -> Optional[str]:
        return self._laws.get(fold(name))

    def get(self, law: str, article: int) -> Optional[ProvisionRef]:
        law_name = self.resolve_law(law) or law.strip()
        if not law_name:
            return None
        probe = ProvisionRef(law_name, article)
        if probe not in self._index:
            return None
        return self._provisions[self._index[probe]]

    def by_code(self, code: str) -> Optional[ProvisionRef]:
        return self._by_code.get(code)

    def lookup(self, token: str) -> ProvisionRef:
        """
        Resolve a command-line style token: a short code (``A``) or ``law:article`` (``Civil Code:6``).
        """
        token = token.strip()
        provision = self.by_code(token)
        if provision is not None:
            return provision
        law, sep, article = token.rpartition(':')
        if sep and article.strip().isdigit() and int(article) >= 1:
            provision = self.get(law, int(article))
            if provision is not None:
                return provision
        raise UnknownProvisionError([token])

    def extended(self, provisions: Iterable[ProvisionRef]) -> Catalog:
        return Catalog((*self._provisions, *provisions))

    @property
    def citation_pattern(self) -> re.Pattern[str]:
        if self._pattern is None:
            # an alias names the law, so it serves every article of that law
            names_by_law: Dict[str, List[str]] = {}
            for folded, law_name in self._laws.items():
                names_by_law.setdefault(law_name, []).append(folded)
            alternatives: List[Tuple[int, str, str]] = []
            for i, provision in enumerate(self._provisions):
                for j, name in enumerate(names_by_law[provision.law_name]):
                    group = f'p{i}_{j}'
                    self._groups[group] = provision
                    law = r'\s*'.join(re.escape(part) for part in name.split(' '))
                    alternatives.append((len(name), group, law + _ARTICLE_SUFFIX.format(n=provision.article)))
            # longest law name first so a name that prefixes another cannot shadow it
            alternatives.sort(key=lambda alt: (-alt[0], alt[1]))
            body = '|'.join(f'(?P<{group}>{regex})' for _, group, regex in alternatives)
            self._pattern = re.compile(body or r'(?!)')
        return self._pattern

    def provision_for_group(self, group: str) -> ProvisionRef:
        return self._groups[group]


def _parse_date(value: Any) -> datetime.date:
    if isinstance(value, datetime.date):
        return value
    if not isinstance(value, str):
        raise ValueError(f'expected ISO-8601 date string, got {value!r}')
    return datetime.date.fromisoformat(value.strip()[:10])


def _parse_article(value: Any) -> int:
    if isinstance(value, bool):
        raise ValueError(f'invalid article number {value!r}')
    if isinstance(value, int):
        article = value
    elif isinstance(value, str) and value.strip().isdigit():
        article = int(value)
    else:
        raise ValueError(f'invalid article number {value!r}')
    if article < 1:
        raise ValueError(f'invalid article number {value!r}')
    return article


def catalog_from_json(entries: Sequence[Mapping[str, Any]]) -> Catalog:
    if not isinstance(entries, list):
        raise ValueError('catalog must be a JSON array')
    provisions: List[ProvisionRef] = []
    for n, entry in enumerate(entries, start=1):
        try:
            if not isinstance(entry, Mapping):
                raise TypeError(f'expected an object, got {type(entry).__name__}')
            successor = None
            if entry.get('successor'):
                if not isinstance(entry['successor'], Mapping):
                    raise TypeError('successor must be an object')
                successor = ProvisionRef(entry['successor']['law'], _parse_article(entry['successor']['article']))
            patterns = entry.get('patterns', [])
            if not isinstance(patterns, list) or not all(isinstance(p, str) for p in patterns):
                raise TypeError('patterns must be an array of strings')
            if not isinstance(entry.get('short_code') or '', str):
                raise TypeError('short_code must be a string')
            effective = _parse_date(entry['effective']) if entry.get('effective') else None
            provisions.append(
                ProvisionRef(
                    entry['law'],
                    _parse_article(entry['article']),
                    status=entry.get('status', 'in_force'),
                    successor=successor,
                    short_code=entry.get('short_code'),
                    aliases=patterns,
                    effective=effective,
                    subject=entry.get('subject', ''),
                )
            )
        except (AttributeError, KeyError, TypeError, ValueError) as e:
            raise ValueError(f'Invalid catalog entry #{n}: {e}') from e
    return Catalog(provisions)


def load_catalog(path: PathLike = BUNDLED_CATALOG) -> Catalog:
    with open(path, encoding='utf-8') as f:
        entries = json.load(f)
    catalog = catalog_from_json(entries)
    logging.debug('Loaded catalog of %d provisions from %s', len(catalog), path)
    return catalog


def write_catalog(catalog: Catalog, path: PathLike) -> None:
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump([provision.to_json() for provision in catalog], f, ensure_ascii=False, indent=2)
        f.write('\n')


def extract_citations(raw_text: str, catalog: Catalog) -> FrozenSet[ProvisionRef]:
    """
    Find every catalog provision cited in free text. Repeats collapse; the result is always a subset of the catalog.
    """
    if not raw_text:
        return frozenset()
    pattern = catalog.citation_pattern
    found = set()
    for match in pattern.finditer(fold(raw_text)):
        assert match.lastgroup is not None
        found.add(catalog.provision_for_group(match.lastgroup))
    return frozenset(found)


class Judgment:
    def __init__(
        self,
        case_id: str,
        court: str,
        date: datetime.date,
        procedure: Procedure,
        cited: Iterable[ProvisionRef],
        *,
        raw_text: Optional[str] = None,
        title: str = '',
    ):
        if not isinstance(case_id, str) or not case_id.strip():
            raise ValueError(f'Invalid case_id: {case_id!r}')
        if procedure not in PROCEDURES:
            raise ValueError(f'Invalid procedure: {procedure!r}')
        self._case_id: str = case_id.strip()
        self.court: str = court
        self.date: datetime.date = date
        self.procedure: Procedure = procedure
        self.cited: FrozenSet[ProvisionRef] = frozenset(cited)
        self.raw_text: Optional[str] = raw_text
        self.title: str = title

    @property
    def case_id(self) -> str:
        return self._case_id

    def __repr__(self) -> str:
        return f'<{self.__class__.__qualname__} case_id={self._case_id!r} cited={len(self.cited)}>'

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Judgment):
            return NotImplemented
        return (self._case_id, self.court, self.date, self.procedure, self.cited, self.title) == (
            other._case_id,
            other.court,
            other.date,
            other.procedure,
            other.cited,
            other.title,
        )

    def __hash__(self) -> int:
        return hash(self._case_id)

    def to_json(self, catalog: Catalog) -> Dict[str, Any]:
        ret: Dict[str, Any] = {
            'case_id': self._case_id,
            'court': self.court,
            'date': self.date.isoformat(),
            'procedure': self.procedure,
        }
        if self.title:
            ret['title'] = self.title
        ordered = sorted(self.cited, key=catalog.position)
        ret['citations'] = [{'law': p.law_name, 'article': p.article} for p in ordered]
        return ret


class DedupeReport(NamedTuple):
    kept: List[Judgment]
    removed: List[Judgment]
    suspected: List[Tuple[str, str]]


def dedupe(judgments: Sequence[Judgment]) -> DedupeReport:
    """
    Keep the first judgment per case_id. Different case_ids whose folded titles and dates agree are
    reported as suspected duplicates but kept.
    """
    kept: List[Judgment] = []
    removed: List[Judgment] = []
    suspected: List[Tuple[str, str]] = []
    seen_ids: Dict[str, Judgment] = {}
    seen_titles: Dict[Tuple[str, datetime.date], str] = {}
    for judgment in judgments:
        if judgment.case_id in seen_ids:
            logging.info('Removing duplicate record for case %r', judgment.case_id)
            removed.append(judgment)
            continue
        seen_ids[judgment.case_id] = judgment
        kept.append(judgment)
        title = fold_title(judgment.title)
        if not title:
            continue
        first = seen_titles.setdefault((title, judgment.date), judgment.case_id)
        if first != judgment.case_id:
            suspected.append((first, judgment.case_id))
            warnings.warn(
                f'Cases {first!r} and {judgment.case_id!r} share a title and date; possible duplicate',
                CociteWarning,
                stacklevel=2,
            )
    return DedupeReport(kept=kept, removed=removed, suspected=suspected)


class Corpus:
    """
    An immutable, deduplicated set of judgments together with the catalog their citations resolve against.
    """

    def __init__(
        self,
        judgments: Iterable[Judgment],
        catalog: Catalog,
        *,
        window: Optional[Window] = None,
        rejects: Iterable[RecordError] = (),
        duplicates: Optional[DedupeReport] = None,
    ):
        self._judgments: Tuple[Judgment, ...] = tuple(judgments)
        self._catalog: Catalog = catalog
        self.window: Optional[Window] = window
        self.rejects: Tuple[RecordError, ...] = tuple(rejects)
        self.duplicates: DedupeReport = duplicates or DedupeReport(list(self._judgments), [], [])
        self._by_id: Dict[str, Judgment] = {}
        for judgment in self._judgments:
            if judgment.case_id in self._by_id:
                raise ValueError(f'Duplicate case_id in corpus: {judgment.case_id!r}')
            missing = [p.label for p in judgment.cited if p not in catalog]
            if missing:
                raise UnknownProvisionError(missing)
            self._by_id[judgment.case_id] = judgment

    @property
    def judgments(self) -> Tuple[Judgment, ...]:
        return self._judgments

    @property
    def catalog(self) -> Catalog:
        return self._catalog

    @property
    def case_ids(self) -> List[str]:
        return [j.case_id for j in self._judgments]

    def __len__(self) -> int:
        return len(self._judgments)

    def __iter__(self) -> Iterator[Judgment]:
        return iter(self._judgments)

    def __contains__(self, case_id: object) -> bool:
        return case_id in self._by_id

    def __repr__(self) -> str:
        return f'<{self.__class__.__qualname__} judgments={len(self._judgments)} catalog={len(self._catalog)}>'

    def get(self, case_id: str) -> Judgment:
        try:
            return self._by_id[case_id]
        except KeyError:
            raise UnknownCaseError([case_id]) from None

    def without(self, case_ids: Iterable[str]) -> Corpus:
        drop = set(case_ids)
        unknown = sorted(drop - self._by_id.keys())
        if unknown:
            raise UnknownCaseError(unknown)
        return Corpus(
            (j for j in self._judgments if j.case_id not in drop),
            self._catalog,
            window=self.window,
            rejects=self.rejects,
            duplicates=self.duplicates,
        )


def _in_window(date: datetime.date, window: Optional[Window]) -> bool:
    if window is None:
        return True
    start, end = window
    if start is not None and date < start:
        return False
    if end is not None and date > end:
        return False
    return True


def read_records(path: PathLike) -> Iterator[str]:
    """
    Yield the raw lines of a JSON Lines file. Undecodable bytes survive as lone surrogates so
    :func:`parse_corpus` can reject that one record.
    """
    with open(path, encoding='utf-8', errors='surrogateescape') as f:
        yield from f


def _parse_record(
    index: int,
    record: Mapping[str, Any],
    catalog: Catalog,
    on_unknown: OnUnknown,
    additions: Mapping[Tuple[str, int], ProvisionRef],
    pending: Dict[Tuple[str, int], ProvisionRef],
) -> Judgment:
    if not isinstance(record, Mapping):
        raise RecordError(index, 'record is not a JSON object')
    try:
        case_id = record['case_id']
        court = record.get('court') or ''
        date = _parse_date(record['date'])
    except KeyError as e:
        raise RecordError(index, f'missing field {e.args[0]!r}') from None
    except ValueError as e:
        raise RecordError(index, str(e)) from None
    if not isinstance(case_id, str) or not case_id.strip():
        raise RecordError(index, f'invalid case_id {case_id!r}')
    procedure = record.get('procedure') or 'unknown'
    if procedure not in PROCEDURES:
        raise RecordError(index, f'invalid procedure {procedure!r}')
    citations = record.get('citations')
    raw_text = record.get('raw_text')
    cited: List[ProvisionRef] = []
    if citations is not None:
        if not isinstance(citations, list):
            raise RecordError(index, 'citations must be an array')
        unknown: List[str] = []
        for citation in citations:
            try:
                law = citation['law']
                article = _parse_article(citation['article'])
                if not isinstance(law, str) or not law.strip():
                    raise ValueError(law)
            except (KeyError, TypeError, ValueError):
                raise RecordError(index, f'malformed citation {citation!r}') from None
            provision = catalog.get(law, article)
            if provision is None:
                key = (catalog.resolve_law(law) or law.strip(), article)
                if on_unknown == 'extend':
                    provision = additions.get(key) or pending.get(key)
                    if provision is None:
                        provision = ProvisionRef(*key)
                        pending[key] = provision
                else:
                    unknown.append(f'{key[0]}, Art.{key[1]}')
                    continue
            cited.append(provision)
        if unknown:
            raise RecordError(index, f'provision(s) not in catalog: {"; ".join(unknown)}')
    elif isinstance(raw_text, str):
        cited.extend(extract_citations(raw_text, catalog))
    else:
        raise RecordError(index, 'record has neither citations nor raw_text')
    return Judgment(
        case_id,
        str(court),
        date,
        procedure,
        cited,
        raw_text=raw_text if isinstance(raw_text, str) else None,
        title=str(record.get('title') or ''),
    )


def parse_corpus(
    source: Iterable[Union[str, Mapping[str, Any]]],
    catalog: Catalog,
    *,
    window: Optional[Window] = None,
    on_unknown: OnUnknown = 'reject',
) -> Corpus:
    """
    Build a Corpus from a stream of records: JSON Lines text lines or already-decoded mappings.

    Malformed records are collected on ``Corpus.rejects`` (1-based record index) and parsing continues.
    Records that carry ``raw_text`` but no ``citations`` go through :func:`extract_citations`.
    Repeated case_ids are removed by :func:`dedupe`; the report is kept on ``Corpus.duplicates``.

    :param on_unknown: ``'reject'`` drops records citing provisions missing from the catalog;
        ``'extend'`` appends those provisions to the catalog instead.
    """
    if on_unknown not in ('reject', 'extend'):
        raise ValueError(f'Invalid on_unknown mode: {on_unknown!r}')
    judgments: List[Judgment] = []
    rejects: List[RecordError] = []
    additions: Dict[Tuple[str, int], ProvisionRef] = {}
    for index, item in enumerate(source, start=1):
        # provisions first seen in this record; merged only if the record is kept
        pending: Dict[Tuple[str, int], ProvisionRef] = {}
        try:
            if isinstance(item, str):
                if not item.strip():
                    continue
                try:
                    item.encode('utf-8')
                except UnicodeEncodeError:
                    raise RecordError(index, 'invalid UTF-8') from None
                try:
                    record = json.loads(item)
                except json.JSONDecodeError as e:
                    raise RecordError(index, f'invalid JSON: {e.msg}') from None
            else:
                record = item
            judgment = _parse_record(index, record, catalog, on_unknown, additions, pending)
            if not _in_window(judgment.date, window):
                raise RecordError(index, 'outside window')
        except RecordError as e:
            logging.warning('Rejected %s', e)
            rejects.append(e)
            continue
        for key, provision in pending.items():
            additions[key] = provision
            warnings.warn(f'Extending catalog with {provision.label!r} (record {index})', CociteWarning, stacklevel=2)
        judgments.append(judgment)
    if additions:
        catalog = catalog.extended(additions.values())
    report = dedupe(judgments)
    logging.info(
        'Parsed %d judgments (%d rejected, %d duplicates removed)', len(report.kept), len(rejects), len(report.removed)
    )
    return Corpus(report.kept, catalog, window=window, rejects=rejects, duplicates=report)


def write_corpus(corpus: Corpus, path_or_file: Union[PathLike, IO[str]]) -> None:
    if isinstance(path_or_file, (str, os.PathLike)):
        with open(path_or_file, 'w', encoding='utf-8', newline='\n') as f:
            write_corpus(corpus, f)
        return None
    for judgment in corpus:
        path_or_file.write(json.dumps(judgment.to_json(corpus.catalog), ensure_ascii=False) + '\n')
    return None


class YearStats(NamedTuple):
    count: int
    summary_fraction: float


class CorpusStats(NamedTuple):
    total: int
    by_procedure: Dict[Procedure, int]
    by_year: Dict[int, YearStats]


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """
    Count judgments per procedure and per year. The yearly fraction counts summary and small-claims cases.
    """
    by_procedure: Dict[Procedure, int] = {p: 0 for p in PROCEDURES}
    years: Dict[int, List[int]] = {}
    for judgment in corpus:
        by_procedure[judgment.procedure] += 1
        tally = years.setdefault(judgment.date.year, [0, 0])
        tally[0] += 1
        if judgment.procedure in ('summary', 'small_claims'):
            tally[1] += 1
    by_year = {year: YearStats(count, simplified / count) for year, (count, simplified) in sorted(years.items())}
    return CorpusStats(total=len(corpus), by_procedure=by_procedure, by_year=by_year)
