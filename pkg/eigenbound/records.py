"""Experiment records and the CSV / JSON reports built from them."""

import dataclasses
import enum
import json
import math
from collections import OrderedDict
from typing import Any, Dict, Iterable, List, Sequence, TextIO

import numpy as np
from file_or_name import file_or_name

import eigenbound
from eigenbound import utils

CSV_COLUMNS = (
    "manifold",
    "family",
    "index",
    "lambda",
    "kappa",
    "p",
    "hormander_ratio",
    "restriction_ratio",
    "equiv_ratio",
    "half_bound_margin",
)
RATIO_FIELDS = (
    "hormander_ratio",
    "restriction_ratio",
    "restriction_normalized",
    "equiv_ratio",
)


@dataclasses.dataclass(eq=True)
class ExperimentRecord:
    """One sweep item. Ratios a run does not measure stay nan."""

    manifold: str
    family: str
    index: str
    lam: float
    kappa: float = math.nan
    p: float = math.nan
    hormander_ratio: float = math.nan
    restriction_ratio: float = math.nan
    equiv_ratio: float = math.nan
    half_bound_margin: float = math.nan
    restriction_normalized: float = math.nan
    linear_ratio: float = math.nan
    reconstructed_constant: float = math.nan
    sup_norm: float = math.nan
    l2_norm: float = math.nan
    excluded: bool = False
    experiment: str = ""

    @property
    def sort_key(self):
        index = tuple(int(i) for i in self.index.split(":"))
        return (self.manifold, self.family, index)

    def csv_row(self) -> str:
        values = [self.manifold, self.family, self.index]
        values += [
            utils.significant(getattr(self, "lam" if column == "lambda" else column))
            for column in CSV_COLUMNS[3:]
        ]
        return ",".join(values)

    def serialize(self) -> Dict[str, Any]:
        return dataclasses.asdict(self, dict_factory=OrderedDict)


def sort_records(records: Iterable[ExperimentRecord]) -> List[ExperimentRecord]:
    return sorted(records, key=lambda record: record.sort_key)


def running_maxima(records: Sequence[ExperimentRecord]) -> Dict[str, float]:
    """Largest finite value of each ratio, the empirical constants of a sweep."""
    maxima = {}
    for field in RATIO_FIELDS:
        values = [getattr(r, field) for r in records]
        values = [value for value in values if math.isfinite(value)]
        maxima[field] = max(values) if values else math.nan
    return maxima


@file_or_name(file="w")
def write_csv(records: Sequence[ExperimentRecord], file: TextIO):
    file.write(",".join(CSV_COLUMNS) + "\n")
    for record in sort_records(records):
        file.write(record.csv_row() + "\n")


@dataclasses.dataclass
class CheckResult:
    name: str
    passed: bool
    margin: float
    tolerance: float
    detail: str = ""

    def serialize(self) -> Dict[str, Any]:
        return OrderedDict(
            name=self.name,
            **{"pass": self.passed},
            margin=self.margin,
            tolerance=self.tolerance,
            detail=self.detail,
        )


def finite_or_none(obj):
    """JSON has no nan; missing measurements become null."""
    if isinstance(obj, np.ndarray):
        return finite_or_none(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {key: finite_or_none(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [finite_or_none(value) for value in obj]
    return obj


class ReportEncoder(json.JSONEncoder):
    def default(self, obj):
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, np.generic):
            return obj.item()
        if isinstance(obj, enum.Enum):
            return obj.value
        return json.JSONEncoder.default(self, obj)


@dataclasses.dataclass
class Report:
    config: Dict[str, Any]
    checks: List[CheckResult] = dataclasses.field(default_factory=list)
    records: List[ExperimentRecord] = dataclasses.field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def serialize(self) -> Dict[str, Any]:
        records = sort_records(self.records)
        return finite_or_none(
            {
                "version": eigenbound.__version__,
                "config": self.config,
                "checks": [check.serialize() for check in self.checks],
                "records": [record.serialize() for record in records],
                "constants": running_maxima(records),
            }
        )

    def __str__(self):
        return json.dumps(self.serialize(), indent=4, sort_keys=True, cls=ReportEncoder)

    @file_or_name(file="w")
    def write(self, file: TextIO):
        file.write(str(self))
