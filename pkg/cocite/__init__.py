from typing import Any
from typing import Optional

from .affiliation import AffiliationMatrix
from .affiliation import build_affiliation
from .affiliation import provision_frequency
from .corpus import Catalog
from .corpus import Corpus
from .corpus import corpus_stats
from .corpus import dedupe
from .corpus import extract_citations
from .corpus import Judgment
from .corpus import load_catalog
from .corpus import parse_corpus
from .corpus import ProvisionRef
from .exceptions import CociteError
from .exceptions import CociteWarning
from .export import export_graph
from .graph import CoCitationGraph
from .graph import connected_components
from .graph import exclude
from .graph import exclude_outliers
from .graph import isolate_outliers
from .graph import merge_graphs
from .graph import project
from .metrics import betweenness
from .metrics import cronbach
from .metrics import degree
from .metrics import density
from .metrics import metrics_table
from .metrics import size
from .retrieval import build_index
from .retrieval import classify_case
from .retrieval import search_text
from .retrieval import similar_cases

__all__ = [
    'AffiliationMatrix',
    'Catalog',
    'CoCitationGraph',
    'CociteError',
    'CociteWarning',
    'Corpus',
    'Judgment',
    'ProvisionRef',
    'betweenness',
    'build_affiliation',
    'build_index',
    'classify_case',
    'connected_components',
    'corpus_stats',
    'cronbach',
    'dedupe',
    'degree',
    'density',
    'exclude',
    'exclude_outliers',
    'export_graph',
    'extract_citations',
    'isolate_outliers',
    'load_catalog',
    'merge_graphs',
    'metrics_table',
    'parse_corpus',
    'project',
    'provision_frequency',
    'search_text',
    'similar_cases',
    'size',
]

_bundled_corpus: Optional[Corpus] = None


def __getattr__(name: str) -> Any:
    global _bundled_corpus
    if name == 'bundled_corpus':
        if _bundled_corpus is None:
            from .corpus import BUNDLED_JUDGMENTS
            from .corpus import read_records

            _bundled_corpus = parse_corpus(read_records(BUNDLED_JUDGMENTS), load_catalog())
        return _bundled_corpus
    raise AttributeError(f'module {__name__!r} has no attribute {name!r}')
