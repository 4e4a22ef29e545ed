"""
Run configuration for the command line pipeline: where inputs come from, where artifacts go, and which
formats to write.
"""
from __future__ import annotations

import datetime
import os
import pathlib
import sys
from typing import FrozenSet
from typing import Iterable
from typing import List
from typing import Literal
from typing import Optional
from typing import Tuple
from typing import Union
from typing import cast

if sys.version_info < (3, 10):
    from typing_extensions import TypeAlias
else:
    from typing import TypeAlias

from .corpus import BUNDLED_CATALOG
from .corpus import Window
from .exceptions import ConfigurationError
from .exceptions import UnsupportedFormatError

ExclusionMode: TypeAlias = Literal['auto', 'manual', 'off']
Format: TypeAlias = Literal['graphml', 'dot', 'csv', 'text']
PathArg: TypeAlias = Union[str, 'os.PathLike[str]', None]

OUT_ENV_VAR = 'COCITE_OUT'
DEFAULT_OUT = 'cocite-out'
CORPUS_FILENAME = 'corpus.jsonl'
CATALOG_FILENAME = 'catalog.json'
EXCLUDED_FILENAME = 'excluded.json'
ALL_FORMATS: Tuple[Format, ...] = ('graphml', 'dot', 'csv', 'text')


def resolve_output_dir(out: PathArg = None) -> pathlib.Path:
    """
    Explicit value first, then ``$COCITE_OUT``, then ``./cocite-out``.
    """
    if not out:
        out = os.environ.get(OUT_ENV_VAR, '') or DEFAULT_OUT
    path = pathlib.Path(out)
    if path.exists() and not path.is_dir():
        raise ConfigurationError(f'Output path {str(path)!r} exists but is not a directory')
    return path


def resolve_catalog_path(catalog: PathArg, out_dir: pathlib.Path) -> pathlib.Path:
    """
    Explicit value first, then the catalog a previous ``ingest`` wrote to ``out_dir``, then the bundled catalog.
    """
    if catalog:
        path = pathlib.Path(catalog)
    elif (out_dir / CATALOG_FILENAME).exists():
        path = out_dir / CATALOG_FILENAME
    else:
        path = BUNDLED_CATALOG
    if not path.exists():
        raise ConfigurationError(f'Catalog not found: {str(path)!r}')
    if path.is_dir():
        raise ConfigurationError(f'The catalog path {str(path)!r} is a directory, but should be a file')
    return path


def parse_formats(value: Union[str, Iterable[str]], allowed: Iterable[str] = ALL_FORMATS) -> Tuple[Format, ...]:
    """
    Split a comma separated format list, keeping first-seen order and dropping repeats.
    """
    tokens = value.split(',') if isinstance(value, str) else list(value)
    allowed = tuple(allowed)
    formats: List[str] = []
    for token in tokens:
        token = token.strip().lower()
        if not token:
            continue
        if token not in allowed:
            raise UnsupportedFormatError(f'Unsupported format: {token!r}. Expected one of {", ".join(allowed)}')
        if token not in formats:
            formats.append(token)
    if not formats:
        raise UnsupportedFormatError('At least one output format is required')
    return tuple(cast(Format, f) for f in formats)


def parse_exclusion(value: str) -> Tuple[ExclusionMode, Tuple[str, ...]]:
    """
    ``auto`` and ``off`` select a mode; anything else is a comma separated list of case_ids to exclude.
    """
    value = value.strip()
    if value.lower() in ('auto', 'off'):
        return cast(ExclusionMode, value.lower()), ()
    ids = tuple(dict.fromkeys(token.strip() for token in value.split(',') if token.strip()))
    if not ids:
        raise ValueError('--exclude needs auto, off, or at least one case_id')
    return 'manual', ids


class RunConfig:
    """
    Resolved settings for one command line invocation. Paths named explicitly must exist.
    """

    def __init__(
        self,
        *,
        input_path: PathArg = None,
        catalog_path: PathArg = None,
        window: Optional[Window] = None,
        exclusion: ExclusionMode = 'auto',
        excluded_ids: Iterable[str] = (),
        out_dir: PathArg = None,
        formats: Iterable[Format] = ('csv', 'text'),
        passes: int = 1,
        workers: int = 1,
    ):
        self.out_dir: pathlib.Path = resolve_output_dir(out_dir)
        self.input_path: pathlib.Path = pathlib.Path(input_path) if input_path else self.out_dir / CORPUS_FILENAME
        if not self.input_path.exists():
            raise ConfigurationError(f'Input not found: {str(self.input_path)!r}')
        if self.input_path.is_dir():
            raise ConfigurationError(f'The input path {str(self.input_path)!r} is a directory, but should be a file')
        self.catalog_path: pathlib.Path = resolve_catalog_path(catalog_path, self.out_dir)
        if window is not None:
            start, end = window
            if start is not None and end is not None and start > end:
                raise ConfigurationError(f'Empty date window: {start.isoformat()} is after {end.isoformat()}')
        self.window: Optional[Window] = window
        self.exclusion: ExclusionMode = exclusion
        self.excluded_ids: Tuple[str, ...] = tuple(excluded_ids)
        if exclusion == 'manual' and not self.excluded_ids:
            raise ConfigurationError('Manual exclusion needs at least one case_id')
        self.formats: FrozenSet[Format] = frozenset(formats)
        if not self.formats:
            raise ConfigurationError('At least one output format is required')
        if passes < 1:
            raise ConfigurationError(f'passes must be at least 1, got {passes}')
        self.passes: int = passes
        if workers < 1:
            raise ConfigurationError(f'workers must be at least 1, got {workers}')
        self.workers: int = workers

    def __repr__(self) -> str:
        return (
            f'<{self.__class__.__qualname__} input={str(self.input_path)!r} catalog={str(self.catalog_path)!r} '
            f'out={str(self.out_dir)!r} exclusion={self.exclusion!r} formats={sorted(self.formats)!r}>'
        )

    def artifact(self, name: str) -> pathlib.Path:
        """Path of ``name`` inside the output directory, creating the directory on first use."""
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / name


def parse_date(value: str) -> datetime.date:
    try:
        return datetime.date.fromisoformat(value.strip())
    except ValueError:
        raise ValueError(f'invalid ISO date {value!r}') from None
