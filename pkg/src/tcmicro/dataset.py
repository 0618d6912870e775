"""Tabular data model: attribute roles, CSV I/O, normalization parameters and
seeded synthetic data with a controlled QI/confidential correlation."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np


class Role(enum.Enum):
    QUASI_IDENTIFIER = "qi"
    CONFIDENTIAL = "confidential"
    IGNORED = "ignore"


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    role: Role


@dataclass(frozen=True)
class Table:
    """A microdata set: n records of real-valued cells with per-attribute roles.

    Immutable after construction. Requires at least one quasi-identifier and
    exactly one confidential attribute; rows must be complete (no NaN).
    """

    specs: tuple[AttributeSpec, ...]
    rows: np.ndarray

    def __post_init__(self):
        specs = tuple(self.specs)
        rows = np.ascontiguousarray(np.asarray(self.rows, dtype=np.float64))
        if rows.ndim != 2:
            raise ValueError("rows must be a 2-D array of reals")
        if rows.shape[0] < 1:
            raise ValueError("a table must contain at least one record")
        if rows.shape[1] != len(specs):
            raise ValueError(
                f"rows have {rows.shape[1]} cells but {len(specs)} attributes are declared"
            )
        if not np.all(np.isfinite(rows)):
            raise ValueError("rows contain missing or non-finite cells")
        n_qi = sum(1 for s in specs if s.role is Role.QUASI_IDENTIFIER)
        n_conf = sum(1 for s in specs if s.role is Role.CONFIDENTIAL)
        if n_qi < 1:
            raise ValueError("at least one quasi-identifier attribute is required")
        if n_conf != 1:
            raise ValueError(f"exactly one confidential attribute is required, got {n_conf}")
        rows.setflags(write=False)
        object.__setattr__(self, "specs", specs)
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def qi_indices(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.specs) if s.role is Role.QUASI_IDENTIFIER)

    @property
    def confidential_index(self) -> int:
        return next(i for i, s in enumerate(self.specs) if s.role is Role.CONFIDENTIAL)

    def qi_matrix(self) -> np.ndarray:
        """The (n, q) matrix of quasi-identifier values in original units."""
        return self.rows[:, self.qi_indices]

    def confidential_column(self) -> np.ndarray:
        return self.rows[:, self.confidential_index]


@dataclass(frozen=True)
class AnonymizedTable:
    """A table whose QI cells were replaced by cluster centroids, plus the
    cluster id assigned to every record."""

    table: Table
    cluster_ids: np.ndarray

    def __post_init__(self):
        ids = np.asarray(self.cluster_ids, dtype=np.int64)
        if ids.shape != (self.table.n,):
            raise ValueError("cluster_ids must hold one id per record")
        ids.setflags(write=False)
        object.__setattr__(self, "cluster_ids", ids)

    @property
    def n(self) -> int:
        return self.table.n


@dataclass(frozen=True)
class NormalizationParams:
    """Per-QI min/max taken from the original table; frozen before anonymization
    so all distances and SSE terms share one scale."""

    names: tuple[str, ...]
    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        mins = np.asarray(self.mins, dtype=np.float64)
        maxs = np.asarray(self.maxs, dtype=np.float64)
        if mins.shape != maxs.shape or mins.shape != (len(self.names),):
            raise ValueError("mins/maxs must align with the QI attribute names")
        if np.any(mins > maxs):
            raise ValueError("per-attribute min must not exceed max")
        mins.setflags(write=False)
        maxs.setflags(write=False)
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)

    @property
    def spans(self) -> np.ndarray:
        return self.maxs - self.mins


def minmax_params(table: Table) -> NormalizationParams:
    """Min-max normalization parameters over the table's QI columns."""
    qi = table.qi_matrix()
    names = tuple(table.specs[i].name for i in table.qi_indices)
    return NormalizationParams(names, qi.min(axis=0), qi.max(axis=0))


def load_csv(
    path: Union[str, Path],
    roles: Sequence[AttributeSpec],
    drop_missing: bool = False,
) -> Table:
    """Load a UTF-8, comma-separated file with a header row into a Table.

    Every header column must have a declared role and vice versa; column order
    follows the file. Cells must parse as decimal reals. A row with a missing
    or unparseable cell is dropped when drop_missing is set, otherwise it is an
    error naming the row and column.
    """
    by_name = {spec.name: spec for spec in roles}
    if len(by_name) != len(roles):
        raise ValueError("duplicate attribute names in roles")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        for name in header:
            if name not in by_name:
                raise ValueError(f"unknown column '{name}': no role declared for it")
        missing_cols = set(by_name) - set(header)
        if missing_cols:
            raise ValueError(f"declared columns missing from file: {sorted(missing_cols)}")
        specs = tuple(by_name[name] for name in header)

        parsed_rows = []
        for row_no, raw in enumerate(reader, start=1):
            if not raw or all(cell.strip() == "" for cell in raw):
                continue
            if len(raw) != len(header):
                raise ValueError(f"row {row_no}: expected {len(header)} cells, got {len(raw)}")
            values = []
            bad_col = None
            for col, cell in zip(header, raw):
                cell = cell.strip()
                if cell == "":
                    bad_col = col
                    break
                try:
                    values.append(float(cell))
                except ValueError:
                    bad_col = col
                    break
            if bad_col is not None:
                if drop_missing:
                    continue
                raise ValueError(f"row {row_no}, column '{bad_col}': missing or unparseable cell")
            parsed_rows.append(values)

    if not parsed_rows:
        raise ValueError(f"{path}: no usable rows after parsing")
    return Table(specs, np.array(parsed_rows, dtype=np.float64))


def load_anonymized_csv(path: Union[str, Path], roles: Sequence[AttributeSpec]) -> AnonymizedTable:
    """Load an anonymized release written by write_csv: the declared columns
    plus a trailing integer cluster_id column."""
    by_name = {spec.name: spec for spec in roles}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if not header or header[-1] != "cluster_id":
            raise ValueError(f"{path}: expected a trailing cluster_id column")
        value_cols = header[:-1]
        for name in value_cols:
            if name not in by_name:
                raise ValueError(f"unknown column '{name}': no role declared for it")
        specs = tuple(by_name[name] for name in value_cols)
        rows = []
        ids = []
        for row_no, raw in enumerate(reader, start=1):
            if not raw or all(cell.strip() == "" for cell in raw):
                continue
            if len(raw) != len(header):
                raise ValueError(f"row {row_no}: expected {len(header)} cells, got {len(raw)}")
            try:
                rows.append([float(c) for c in raw[:-1]])
                ids.append(int(raw[-1]))
            except ValueError:
                raise ValueError(f"row {row_no}: unparseable cell") from None
    if not rows:
        raise ValueError(f"{path}: no usable rows after parsing")
    return AnonymizedTable(Table(specs, np.array(rows)), np.array(ids, dtype=np.int64))


def write_csv(data: Union[Table, AnonymizedTable], path: Union[str, Path]) -> None:
    """Write a table (or anonymized table, with a trailing cluster_id column)
    as UTF-8 CSV. Values round-trip through load_csv exactly."""
    if isinstance(data, AnonymizedTable):
        table, ids = data.table, data.cluster_ids
    else:
        table, ids = data, None
    header = [spec.name for spec in table.specs]
    if ids is not None:
        header.append("cluster_id")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(table.n):
            row = [repr(float(v)) for v in table.rows[i]]
            if ids is not None:
                row.append(str(int(ids[i])))
            writer.writerow(row)


@dataclass(frozen=True)
class SynthConfig:
    """Parameters for the seeded synthetic surrogate generator.

    target_correlation is the Pearson correlation between the confidential
    attribute and the standardized mean of the standardized QI columns.
    ranges holds one (low, high) pair per QI followed by one for the
    confidential attribute; defaults to (0, 100000) everywhere.
    skew is the lognormal sigma of the QI marginals: the default 1.5 gives the
    heavy right tail typical of income-like magnitudes, 0 gives Gaussian QIs.
    """

    n: int
    qi_count: int
    target_correlation: float
    seed: int
    ranges: tuple[tuple[float, float], ...] | None = None
    skew: float = 1.5

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.qi_count < 1:
            raise ValueError("qi_count must be at least 1")
        if abs(self.target_correlation) > 1.0:
            raise ValueError("target correlation must lie in [-1, 1]")
        if self.skew < 0:
            raise ValueError("skew must be nonnegative")
        if self.ranges is not None:
            ranges = tuple((float(lo), float(hi)) for lo, hi in self.ranges)
            if len(ranges) != self.qi_count + 1:
                raise ValueError("need one range per QI plus one for the confidential attribute")
            if any(lo >= hi for lo, hi in ranges):
                raise ValueError("each range must satisfy low < high")
            object.__setattr__(self, "ranges", ranges)

    def resolved_ranges(self) -> tuple[tuple[float, float], ...]:
        if self.ranges is not None:
            return self.ranges
        return tuple((0.0, 100000.0) for _ in range(self.qi_count + 1))


def _standardize(x: np.ndarray) -> np.ndarray:
    sd = x.std()
    if sd == 0.0:
        return np.zeros_like(x)
    return (x - x.mean()) / sd


def qi_mix(qi_matrix: np.ndarray) -> np.ndarray:
    """Standardized equal-weight combination of the standardized QI columns,
    the reference direction for the generator's target correlation."""
    cols = np.column_stack([_standardize(qi_matrix[:, j]) for j in range(qi_matrix.shape[1])])
    return _standardize(cols.mean(axis=1))


def _affine_to_range(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    span = x.max() - x.min()
    if span == 0.0:
        return np.full_like(x, lo)
    return lo + (x - x.min()) * (hi - lo) / span


def synth_generate(cfg: SynthConfig) -> Table:
    """Deterministic synthetic table: QI columns are (optionally lognormal)
    latent draws and the confidential column is
    target_correlation * mix + sqrt(1 - rho^2) * noise, with the noise
    orthogonalized against the mix so the achieved correlation matches the
    target exactly; every column is then affine-mapped to its range."""
    rng = np.random.default_rng(cfg.seed)
    z = rng.standard_normal((cfg.n, cfg.qi_count))
    if cfg.skew > 0:
        z = np.exp(cfg.skew * z)
    raw_noise = rng.standard_normal(cfg.n)

    mix = qi_mix(z)
    noise = raw_noise - raw_noise.mean()
    noise = noise - (noise @ mix / cfg.n) * mix
    noise = _standardize(noise)

    rho = cfg.target_correlation
    conf = rho * mix + math.sqrt(max(0.0, 1.0 - rho * rho)) * noise

    ranges = cfg.resolved_ranges()
    columns = [_affine_to_range(z[:, j], *ranges[j]) for j in range(cfg.qi_count)]
    columns.append(_affine_to_range(conf, *ranges[-1]))

    specs = tuple(
        AttributeSpec(f"qi{j + 1}", Role.QUASI_IDENTIFIER) for j in range(cfg.qi_count)
    ) + (AttributeSpec("conf", Role.CONFIDENTIAL),)
    return Table(specs, np.column_stack(columns))


def achieved_correlation(table: Table) -> float:
    """Pearson correlation between the confidential attribute and the
    standardized QI mix, the quantity synth_generate targets."""
    mix = qi_mix(table.qi_matrix())
    conf = _standardize(table.confidential_column())
    if not mix.any() or not conf.any():
        return 0.0
    return float(mix @ conf / table.n)
