from __future__ import annotations

import csv
import logging
import warnings
from typing import Dict
from typing import IO
from typing import List
from typing import NamedTuple
from typing import Tuple

import numpy as np
import numpy.typing as npt

from .corpus import Corpus
from .corpus import ProvisionRef
from .exceptions import CociteWarning


class AffiliationMatrix:
    """
    Binary provisions x judgments incidence matrix. ``cells[i, j] == 1`` iff row provision ``i`` is cited by column
    judgment ``j``. Rows follow catalog order, columns follow corpus order. The cell array is read-only.
    """

    def __init__(self, rows: Tuple[ProvisionRef, ...], cols: Tuple[str, ...], cells: npt.NDArray[np.uint8]):
        if cells.shape != (len(rows), len(cols)):
            raise ValueError(f'cells shape {cells.shape} does not match {len(rows)} rows x {len(cols)} columns')
        self._rows: Tuple[ProvisionRef, ...] = rows
        self._cols: Tuple[str, ...] = cols
        cells = cells.copy()
        cells.flags.writeable = False
        self._cells: npt.NDArray[np.uint8] = cells

    @property
    def rows(self) -> Tuple[ProvisionRef, ...]:
        return self._rows

    @property
    def cols(self) -> Tuple[str, ...]:
        return self._cols

    @property
    def cells(self) -> npt.NDArray[np.uint8]:
        return self._cells

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self._rows), len(self._cols))

    def __repr__(self) -> str:
        return f'<{self.__class__.__qualname__} {len(self._rows)}x{len(self._cols)}>'

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AffiliationMatrix):
            return NotImplemented
        return (
            self._rows == other._rows and self._cols == other._cols and np.array_equal(self._cells, other._cells)
        )

    def column(self, j: int) -> List[ProvisionRef]:
        """Provisions cited by column ``j``, in row order."""
        return [self._rows[i] for i in np.flatnonzero(self._cells[:, j])]

    def unused(self) -> List[ProvisionRef]:
        """Catalog provisions no judgment cites."""
        if not self._cols:
            return list(self._rows)
        return [self._rows[i] for i in np.flatnonzero(self._cells.sum(axis=1) == 0)]

    def to_csv(self, f: IO[str]) -> None:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['', *self._cols])
        for provision, row in zip(self._rows, self._cells):
            writer.writerow([provision.label, *(int(x) for x in row)])
        return None


def build_affiliation(corpus: Corpus) -> AffiliationMatrix:
    rows = tuple(corpus.catalog)
    cols = tuple(corpus.case_ids)
    cells = np.zeros((len(rows), len(cols)), dtype=np.uint8)
    for j, judgment in enumerate(corpus):
        for provision in judgment.cited:
            cells[corpus.catalog.position(provision), j] = 1
    matrix = AffiliationMatrix(rows, cols, cells)
    unused = matrix.unused()
    if unused and cols:
        warnings.warn(
            f'{len(unused)} catalog provision(s) are cited by no judgment: {", ".join(p.display for p in unused)}',
            CociteWarning,
            stacklevel=2,
        )
    logging.debug('Built %dx%d affiliation matrix with %d incidences', len(rows), len(cols), int(cells.sum()))
    return matrix


class Frequency(NamedTuple):
    count: int
    fraction: float


def provision_frequency(matrix: AffiliationMatrix) -> Dict[ProvisionRef, Frequency]:
    """
    Number of judgments citing each provision (row sum), and that count as a share of all judgments.
    """
    n_cols = len(matrix.cols)
    counts = matrix.cells.sum(axis=1, dtype=np.int64) if n_cols else np.zeros(len(matrix.rows), dtype=np.int64)
    return {
        provision: Frequency(int(count), int(count) / n_cols if n_cols else 0.0)
        for provision, count in zip(matrix.rows, counts)
    }
