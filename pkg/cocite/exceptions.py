from __future__ import annotations

from typing import Iterable
from typing import Tuple


class CociteBaseException(Exception):
    ...


CociteError = CociteBaseException


class CociteWarning(UserWarning):
    ...


class RecordError(CociteBaseException, ValueError):
    def __init__(self, index: int, reason: str):
        self.index: int = index
        self.reason: str = reason
        super().__init__(f'record {index}: {reason}')


class UnknownProvisionError(CociteBaseException, KeyError):
    def __init__(self, keys: Iterable[str]):
        self.keys: Tuple[str, ...] = tuple(keys)
        super().__init__(f'provision(s) not in catalog: {", ".join(self.keys)}')

    def __str__(self) -> str:
        # KeyError would repr() the message
        return str(self.args[0])


class UnknownCaseError(CociteBaseException, KeyError):
    def __init__(self, case_ids: Iterable[str]):
        self.case_ids: Tuple[str, ...] = tuple(case_ids)
        super().__init__(f'unknown case_id(s): {", ".join(self.case_ids)}')

    def __str__(self) -> str:
        return str(self.args[0])


class EmptyQueryError(CociteBaseException, ValueError):
    ...


class ReliabilityError(CociteBaseException, ValueError):
    ...


class UnsupportedFormatError(CociteBaseException, ValueError):
    ...


class ConfigurationError(CociteBaseException, EnvironmentError):
    ...
