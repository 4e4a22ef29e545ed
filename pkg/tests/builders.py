"""
Small corpora built from short-code strings: ``make_corpus(['AB', 'BC'])`` is two judgments citing {A, B} and {B, C}.
"""
from __future__ import annotations

import datetime
import string
from typing import Iterable
from typing import Optional
from typing import Sequence

from cocite.corpus import Catalog
from cocite.corpus import Corpus
from cocite.corpus import Judgment
from cocite.corpus import load_catalog
from cocite.corpus import ProvisionRef

TEST_LAW = 'Test Law'


def make_catalog(codes: Iterable[str] = string.ascii_uppercase) -> Catalog:
    return Catalog(ProvisionRef(TEST_LAW, i + 1, short_code=code) for i, code in enumerate(codes))


def make_judgment(case_id: str, cited: Iterable[ProvisionRef], court: str = 'Test Court') -> Judgment:
    return Judgment(case_id, court, datetime.date(2023, 1, 1), 'summary', cited)


def make_corpus(cited: Sequence[Sequence[str]], catalog: Optional[Catalog] = None, prefix: str = 'case') -> Corpus:
    if catalog is None:
        catalog = make_catalog()
    judgments = []
    for n, codes in enumerate(cited):
        provisions = []
        for code in codes:
            provision = catalog.by_code(code)
            assert provision is not None, code
            provisions.append(provision)
        judgments.append(make_judgment(f'{prefix}{n:03d}', provisions))
    return Corpus(judgments, catalog)


# the twelve judgment types of the bundled fixture and how often each occurs
FIXTURE_TYPES = {
    'ABFJ': 4,
    'ADHE': 4,
    'ACGI': 10,
    'ACGNR': 8,
    'CGLE': 4,
    'CGKI': 3,
    'CGON': 3,
    'CGLP': 3,
    'LMQ': 2,
    'MQR': 2,
    'CGIL': 2,
    'CGEN': 3,
}

TABLE_DEGREES = {
    'A': 11,
    'B': 3,
    'C': 10,
    'D': 3,
    'E': 7,
    'F': 3,
    'G': 10,
    'H': 3,
    'I': 5,
    'J': 3,
    'K': 3,
    'L': 7,
    'M': 3,
    'N': 6,
    'O': 3,
    'P': 3,
    'Q': 3,
    'R': 6,
}

OUTLIER_CASE = '(2022)Jing0113MinChu2776'
OUTLIER_CODES = ("Q'", "M'", "D'", "H'")


def fixture_corpus() -> Corpus:
    """The 48 typified judgments, built directly against the bundled catalog."""
    cited = [codes for codes, count in FIXTURE_TYPES.items() for _ in range(count)]
    return make_corpus(cited, catalog=load_catalog(), prefix='typified')
