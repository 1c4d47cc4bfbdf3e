"""Batch runner: sampled profiles, optimal scales, rule scales, CSV records.

A grid enumerates cells (committee shape, electorate size, model,
model parameter); every cell gets a fixed number of seeded replicates.
Records are exact rationals; the CSV serialization carries a float
rendering next to each rational column for spreadsheet use.  Wall time
is tracked in memory only, never written, so reruns stay byte-identical.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import IO, Iterable, Optional, Sequence

from .core import (
    BudgetExceededError,
    Budgets,
    DEFAULT_BUDGETS,
    Instance,
    Rational,
    ValidationError,
    format_rational,
    parse_rational,
)
from .domains import structured_optimal_alpha
from .optimize import optimal_alpha_ejr
from .rules import RULES
from .sampling import SamplerConfig, derive_seed, sample
from .verify import Axiom, alpha_ejr, alpha_jr

RULE_ORDER = ("mes", "seqphragmen", "cc", "pav")

RULE_COMMITTEE_CAP = 5


@dataclass(frozen=True)
class ExperimentGrid:
    """Cell layout: (k, m) pairs with k < m, crossed with n and with the
    per-model parameter lists.  Cells are numbered row-major in the
    order pairs x n x (ic params, then euclidean params); replicate
    seeds derive from (master seed, cell index, replicate index)."""

    n_values: tuple[int, ...] = (11, 12, 29, 59)
    m_values: tuple[int, ...] = (5, 9, 15)
    k_values: tuple[int, ...] = (3, 5, 8, 11)
    ic_p: tuple[float, ...] = (0.3, 0.5)
    euclidean_t: tuple[float, ...] = (1.7, 2.3)
    instances_per_cell: int = 100
    sigma: float = 0.5

    def __post_init__(self):
        if not self.pairs():
            raise ValidationError("grid has no (k, m) pair with k < m")
        if self.instances_per_cell < 1:
            raise ValidationError("instances_per_cell must be positive")
        if any(not 0 <= p <= 1 for p in self.ic_p):
            raise ValidationError("ic parameters are probabilities")
        if any(t < 0 for t in self.euclidean_t):
            raise ValidationError("euclidean thresholds are non-negative")

    def pairs(self) -> list[tuple[int, int]]:
        return [
            (k, m)
            for k in self.k_values
            for m in self.m_values
            if k < m
        ]

    def rows(self) -> list[tuple[int, int, int]]:
        return [(k, m, n) for k, m in self.pairs() for n in self.n_values]

    def params(self) -> list[tuple[str, float]]:
        return [("ic", p) for p in self.ic_p] + [
            ("euclidean", t) for t in self.euclidean_t
        ]

    def cells(self) -> list[tuple[int, int, int, str, float]]:
        return [
            (k, m, n, model, param)
            for k, m, n in self.rows()
            for model, param in self.params()
        ]

    def replicates(self, scale: float) -> int:
        if not 0 < scale <= 1:
            raise ValidationError("scale must be in (0, 1]")
        return max(1, round(self.instances_per_cell * scale))


@dataclass(frozen=True)
class ExperimentRecord:
    """One sampled instance: optima, per-rule mean scales, bookkeeping.

    jr_means / ejr_means / counts align with RULE_ORDER.  A None
    optimum means the search hit its budget; the record is then flagged
    and summaries skip the affected axiom.
    """

    model: str
    param: float
    n: int
    m: int
    k: int
    seed: int
    alpha_jr_opt: Optional[Rational]
    alpha_ejr_opt: Optional[Rational]
    jr_means: tuple[Rational, ...]
    ejr_means: tuple[Rational, ...]
    counts: tuple[int, ...]
    flags: tuple[str, ...] = ()
    wall_time: float = 0.0


def run_instance(
    inst: Instance,
    *,
    model: str,
    param: float,
    seed: int,
    budgets: Budgets = DEFAULT_BUDGETS,
) -> ExperimentRecord:
    started = time.perf_counter()
    flags = []
    alpha_jr_opt: Optional[Fraction] = None
    alpha_ejr_opt: Optional[Fraction] = None
    try:
        alpha_jr_opt = structured_optimal_alpha(inst, Axiom.JR, budgets=budgets)[1].alpha_star
    except BudgetExceededError:
        flags.append("jr_budget_exceeded")
    try:
        alpha_ejr_opt = optimal_alpha_ejr(inst, budgets=budgets).alpha_star
    except BudgetExceededError:
        flags.append("ejr_budget_exceeded")
    if alpha_ejr_opt is not None and alpha_ejr_opt > Fraction(inst.k, inst.k + 1):
        raise AssertionError(
            f"optimal ejr scale {alpha_ejr_opt} above k/(k+1); optimizer bug"
        )
    jr_means = []
    ejr_means = []
    counts = []
    for rule in RULE_ORDER:
        outcome = RULES[rule](inst, max_committees=RULE_COMMITTEE_CAP)
        jr_values = [alpha_jr(inst, w).alpha_value for w in outcome.committees]
        ejr_values = [alpha_ejr(inst, w).alpha_value for w in outcome.committees]
        jr_mean = sum(jr_values, Fraction(0)) / len(jr_values)
        ejr_mean = sum(ejr_values, Fraction(0)) / len(ejr_values)
        if alpha_jr_opt is not None and jr_mean < alpha_jr_opt:
            raise AssertionError(f"{rule} mean below the jr optimum; optimizer bug")
        if alpha_ejr_opt is not None and ejr_mean < alpha_ejr_opt:
            raise AssertionError(f"{rule} mean below the ejr optimum; optimizer bug")
        jr_means.append(jr_mean)
        ejr_means.append(ejr_mean)
        counts.append(len(outcome.committees))
    return ExperimentRecord(
        model=model,
        param=param,
        n=inst.n,
        m=inst.m,
        k=inst.k,
        seed=seed,
        alpha_jr_opt=alpha_jr_opt,
        alpha_ejr_opt=alpha_ejr_opt,
        jr_means=tuple(jr_means),
        ejr_means=tuple(ejr_means),
        counts=tuple(counts),
        flags=tuple(flags),
        wall_time=time.perf_counter() - started,
    )


def _cell_config(grid: ExperimentGrid, cell, seed: int) -> SamplerConfig:
    k, m, n, model, param = cell
    return SamplerConfig(
        model=model,
        n=n,
        m=m,
        k=k,
        seed=seed,
        p=param if model == "ic" else None,
        t=param if model == "euclidean" else None,
        sigma=grid.sigma,
    )


def _run_cell(args) -> tuple[int, list[ExperimentRecord]]:
    grid, cell_index, cell, master_seed, scale, budgets = args
    records = []
    for rep in range(grid.replicates(scale)):
        inst_seed = derive_seed(master_seed, cell_index, rep)
        inst = sample(_cell_config(grid, cell, inst_seed))
        records.append(
            run_instance(
                inst,
                model=cell[3],
                param=cell[4],
                seed=inst_seed,
                budgets=budgets,
            )
        )
    return cell_index, records


def run_grid(
    grid: ExperimentGrid,
    *,
    scale: float = 1.0,
    seed: int = 0,
    jobs: int = 1,
    budgets: Budgets = DEFAULT_BUDGETS,
    progress=None,
) -> list[ExperimentRecord]:
    """All replicates of all cells, ordered by (cell index, replicate).

    The output is a pure function of (grid, scale, seed): worker count
    only changes wall time.  `progress` is called with (done, total)
    after each finished cell.
    """
    cells = grid.cells()
    tasks = [
        (grid, index, cell, seed, scale, budgets)
        for index, cell in enumerate(cells)
    ]
    results: dict[int, list[ExperimentRecord]] = {}
    if jobs <= 1:
        for task in tasks:
            index, records = _run_cell(task)
            results[index] = records
            if progress is not None:
                progress(len(results), len(cells))
    else:
        from concurrent.futures import ProcessPoolExecutor, as_completed

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_cell, task) for task in tasks]
            for future in as_completed(futures):
                index, records = future.result()
                results[index] = records
                if progress is not None:
                    progress(len(results), len(cells))
    ordered = []
    for index in range(len(cells)):
        ordered.extend(results[index])
    return ordered


# --- CSV ------------------------------------------------------------------


def csv_header() -> list[str]:
    columns = [
        "model",
        "param",
        "n",
        "m",
        "k",
        "seed",
        "alpha_jr_opt",
        "alpha_jr_opt_float",
        "alpha_ejr_opt",
        "alpha_ejr_opt_float",
    ]
    for rule in RULE_ORDER:
        columns += [
            f"{rule}_jr_mean",
            f"{rule}_jr_mean_float",
            f"{rule}_ejr_mean",
            f"{rule}_ejr_mean_float",
            f"{rule}_count",
        ]
    columns.append("flags")
    return columns


def _rational_pair(value: Optional[Rational]) -> list[str]:
    if value is None:
        return ["", ""]
    return [format_rational(value), repr(float(value))]


def record_to_row(record: ExperimentRecord) -> list[str]:
    row = [
        record.model,
        repr(record.param),
        str(record.n),
        str(record.m),
        str(record.k),
        str(record.seed),
        *_rational_pair(record.alpha_jr_opt),
        *_rational_pair(record.alpha_ejr_opt),
    ]
    for position in range(len(RULE_ORDER)):
        row += _rational_pair(record.jr_means[position])
        row += _rational_pair(record.ejr_means[position])
        row.append(str(record.counts[position]))
    row.append(";".join(record.flags))
    return row


def write_csv(records: Iterable[ExperimentRecord], out: IO[str]) -> None:
    out.write(",".join(csv_header()) + "\n")
    for record in records:
        out.write(",".join(record_to_row(record)) + "\n")


def _parse_rational_cell(text: str) -> Optional[Fraction]:
    return parse_rational(text) if text else None


def read_csv(source: IO[str]) -> list[ExperimentRecord]:
    lines = [line.rstrip("\n") for line in source if line.strip()]
    if not lines or lines[0].split(",") != csv_header():
        raise ValidationError("unrecognized experiment CSV header")
    records = []
    for line in lines[1:]:
        parts = line.split(",")
        jr_means, ejr_means, counts = [], [], []
        cursor = 10
        for _ in RULE_ORDER:
            jr_means.append(_parse_rational_cell(parts[cursor]))
            ejr_means.append(_parse_rational_cell(parts[cursor + 2]))
            counts.append(int(parts[cursor + 4]))
            cursor += 5
        records.append(
            ExperimentRecord(
                model=parts[0],
                param=float(parts[1]),
                n=int(parts[2]),
                m=int(parts[3]),
                k=int(parts[4]),
                seed=int(parts[5]),
                alpha_jr_opt=_parse_rational_cell(parts[6]),
                alpha_ejr_opt=_parse_rational_cell(parts[8]),
                jr_means=tuple(jr_means),
                ejr_means=tuple(ejr_means),
                counts=tuple(counts),
                flags=tuple(part for part in parts[cursor].split(";") if part),
            )
        )
    return records


# --- aggregation ------------------------------------------------------------


@dataclass(frozen=True)
class RowSummary:
    k: int
    m: int
    n: int
    instances: int
    excluded_jr: int
    excluded_ejr: int
    jr_distance: tuple[Optional[Rational], ...]
    ejr_distance: tuple[Optional[Rational], ...]


def _grid_check(grid: ExperimentGrid, record: ExperimentRecord) -> None:
    if (record.k, record.m, record.n) not in set(grid.rows()):
        raise ValidationError(
            f"record (k={record.k}, m={record.m}, n={record.n}) is not a grid row"
        )
    if (record.model, record.param) not in grid.params():
        raise ValidationError(
            f"record parameter ({record.model}, {record.param}) is not in the grid"
        )


def summarize(
    records: Sequence[ExperimentRecord],
    grid: Optional[ExperimentGrid] = None,
) -> tuple[RowSummary, ...]:
    """Mean additive distance to the optimum per (k, m, n) row and rule,
    pooling models and parameters; budget-flagged records are excluded
    from the affected axiom and counted in the exclusion columns."""
    grid = grid if grid is not None else ExperimentGrid()
    buckets: dict[tuple[int, int, int], list[ExperimentRecord]] = {
        row: [] for row in grid.rows()
    }
    for record in records:
        _grid_check(grid, record)
        buckets[(record.k, record.m, record.n)].append(record)
    summaries = []
    for row in grid.rows():
        group = buckets[row]
        jr_rows = [r for r in group if r.alpha_jr_opt is not None]
        ejr_rows = [r for r in group if r.alpha_ejr_opt is not None]
        jr_distance = []
        ejr_distance = []
        for position in range(len(RULE_ORDER)):
            jr_distance.append(
                sum((r.jr_means[position] - r.alpha_jr_opt for r in jr_rows), Fraction(0))
                / len(jr_rows)
                if jr_rows
                else None
            )
            ejr_distance.append(
                sum((r.ejr_means[position] - r.alpha_ejr_opt for r in ejr_rows), Fraction(0))
                / len(ejr_rows)
                if ejr_rows
                else None
            )
        summaries.append(
            RowSummary(
                k=row[0],
                m=row[1],
                n=row[2],
                instances=len(group),
                excluded_jr=len(group) - len(jr_rows),
                excluded_ejr=len(group) - len(ejr_rows),
                jr_distance=tuple(jr_distance),
                ejr_distance=tuple(ejr_distance),
            )
        )
    return tuple(summaries)


def pooled_distance(
    records: Sequence[ExperimentRecord], rule: str, axiom: Axiom
) -> Fraction:
    """Mean additive distance for one rule across every usable record."""
    position = RULE_ORDER.index(rule)
    if axiom is Axiom.JR:
        usable = [r for r in records if r.alpha_jr_opt is not None]
        total = sum((r.jr_means[position] - r.alpha_jr_opt for r in usable), Fraction(0))
    elif axiom is Axiom.EJR:
        usable = [r for r in records if r.alpha_ejr_opt is not None]
        total = sum((r.ejr_means[position] - r.alpha_ejr_opt for r in usable), Fraction(0))
    else:
        raise ValidationError(f"no distance defined for axiom {axiom.value}")
    if not usable:
        raise ValidationError("no usable records")
    return total / len(usable)


# --- configuration ------------------------------------------------------------


def _parse_list(raw: str, convert) -> tuple:
    return tuple(convert(part.strip()) for part in raw.split(",") if part.strip())


def load_grid_config(text: str) -> ExperimentGrid:
    """Key=value lines; unknown keys rejected, omitted keys keep the
    default grid's values.  '#' starts a comment."""
    parsers = {
        "n_values": lambda raw: _parse_list(raw, int),
        "m_values": lambda raw: _parse_list(raw, int),
        "k_values": lambda raw: _parse_list(raw, int),
        "ic_p": lambda raw: _parse_list(raw, float),
        "euclidean_t": lambda raw: _parse_list(raw, float),
        "instances_per_cell": int,
        "sigma": float,
    }
    overrides = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        key, sep, raw = body.partition("=")
        key = key.strip()
        if not sep or key not in parsers:
            raise ValidationError(f"bad config line {lineno}: {line!r}")
        try:
            overrides[key] = parsers[key](raw.strip())
        except ValueError as exc:
            raise ValidationError(f"bad config value on line {lineno}: {exc}")
    return replace(ExperimentGrid(), **overrides)
