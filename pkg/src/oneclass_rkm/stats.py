"""Rank-based comparison of several models over many datasets.

Average ranks, the Friedman chi-square and its F refinement, the Nemenyi
critical difference, and the pairwise win-tie-loss sign test, following
Demsar (2006), "Statistical comparisons of classifiers over multiple data
sets", JMLR 7.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.stats import rankdata

from .errors import DegenerateDenominator, MissingCells, UnsupportedK

__all__ = [
    "ResultsTable",
    "WtlEntry",
    "RankReport",
    "NEMENYI_Q05",
    "read_results_csv",
    "write_results_csv",
    "rank_rows",
    "average_ranks",
    "friedman_chi2",
    "friedman_f",
    "nemenyi_cd",
    "nemenyi_significant",
    "wtl_threshold",
    "win_tie_loss",
    "rank_report",
]

# Two-tailed Nemenyi q_0.05 (studentized range / sqrt 2), Demsar (2006) Table 5a.
NEMENYI_Q05 = {
    2: 1.960,
    3: 2.343,
    4: 2.569,
    5: 2.728,
    6: 2.850,
    7: 2.949,
    8: 3.031,
    9: 3.102,
    10: 3.164,
}


@dataclass(frozen=True)
class ResultsTable:
    model_names: list[str]
    dataset_names: list[str]
    acc: NDArray[np.float64]

    def __post_init__(self) -> None:
        acc = np.asarray(self.acc, dtype=float)
        M, k = len(self.dataset_names), len(self.model_names)
        if acc.shape != (M, k):
            raise MissingCells(f"accuracy matrix has shape {acc.shape}, expected {(M, k)}")
        if k < 2:
            raise ValueError(f"need at least 2 models, got {k}")
        if M < 2:
            raise ValueError(f"need at least 2 datasets, got {M}")
        if not np.all(np.isfinite(acc)):
            raise MissingCells("accuracy matrix has missing or non-finite cells")
        object.__setattr__(self, "acc", acc)
        object.__setattr__(self, "model_names", list(self.model_names))
        object.__setattr__(self, "dataset_names", list(self.dataset_names))

    @property
    def k(self) -> int:
        return len(self.model_names)

    @property
    def M(self) -> int:
        return len(self.dataset_names)


def read_results_csv(path: str | Path) -> ResultsTable:
    """Read ``dataset,model_1,...,model_k`` rows of accuracy percentages.

    Columns whose header ends in ``_std`` are ignored, so the benchmark
    output can be fed back in directly.
    """
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if any(c.strip() for c in r)]
    if len(rows) < 2:
        raise MissingCells(f"{path}: need a header row and at least one dataset row")
    header = [c.strip() for c in rows[0]]
    keep = [j for j in range(1, len(header)) if not header[j].endswith("_std")]
    names, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise MissingCells(f"{path}: line {lineno} has {len(row)} cells, expected {len(header)}")
        names.append(row[0].strip())
        try:
            values.append([float(row[j]) for j in keep])
        except ValueError as exc:
            raise MissingCells(f"{path}: line {lineno}: {exc}") from None
    return ResultsTable([header[j] for j in keep], names, np.array(values))


def write_results_csv(path: str | Path, table: ResultsTable) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset"] + table.model_names)
        for name, row in zip(table.dataset_names, table.acc):
            w.writerow([name] + [repr(float(v)) for v in row])


def rank_rows(table: ResultsTable) -> NDArray[np.float64]:
    """Per-dataset ranks, 1 = best accuracy; ties share the average position."""
    return np.vstack([rankdata(-row, method="average") for row in table.acc])


def average_ranks(table: ResultsTable) -> NDArray[np.float64]:
    return rank_rows(table).mean(axis=0)


def friedman_chi2(avg_ranks: Sequence[float], M: int) -> float:
    R = np.asarray(avg_ranks, dtype=float)
    k = R.size
    if k < 2 or M < 2:
        raise ValueError("need k >= 2 models and M >= 2 datasets")
    return 12.0 * M / (k * (k + 1)) * (float(np.sum(R**2)) - k * (k + 1) ** 2 / 4.0)


def friedman_f(chi2: float, M: int, k: int) -> float:
    """Iman-Davenport statistic, F-distributed with (k-1, (M-1)(k-1)) dof."""
    denom = M * (k - 1) - chi2
    if denom <= 0:
        raise DegenerateDenominator(f"M(k-1) = {M * (k - 1)} does not exceed chi2 = {chi2}")
    return (M - 1) * chi2 / denom


def nemenyi_cd(k: int, M: int, alpha: float = 0.05) -> float:
    if alpha != 0.05:
        raise UnsupportedK(f"only alpha = 0.05 is tabulated, got {alpha}")
    if k not in NEMENYI_Q05:
        raise UnsupportedK(f"q_0.05 is tabulated for 2 <= k <= 10, got k = {k}")
    return NEMENYI_Q05[k] * math.sqrt(k * (k + 1) / (6.0 * M))


def nemenyi_significant(avg_ranks: Sequence[float], cd: float) -> NDArray[np.bool_]:
    R = np.asarray(avg_ranks, dtype=float)
    return np.abs(R[:, None] - R[None, :]) > cd


def wtl_threshold(M: int) -> float:
    """Wins needed for significance at the 5% level: ``M/2 + 1.96 * sqrt(M) / 2``."""
    return M / 2.0 + 1.96 * math.sqrt(M) / 2.0


@dataclass(frozen=True)
class WtlEntry:
    """Row model vs column model. ``adjusted_*`` include the split ties."""

    win: int
    tie: int
    loss: int
    adjusted_win: int
    adjusted_loss: int

    def triple(self) -> list[int]:
        return [self.win, self.tie, self.loss]


def _split_ties(win: int, tie: int, loss: int) -> tuple[int, int]:
    # Odd tie counts drop one tie; the rest is shared evenly.
    half = tie // 2
    return win + half, loss + half


def win_tie_loss(table: ResultsTable) -> tuple[list[list[WtlEntry | None]], float]:
    """Pairwise counts over datasets. Entry ``[a][b]`` reads "model a vs model b"."""
    k = table.k
    out: list[list[WtlEntry | None]] = [[None] * k for _ in range(k)]
    for a in range(k):
        for b in range(k):
            if a == b:
                continue
            diff = table.acc[:, a] - table.acc[:, b]
            w = int(np.count_nonzero(diff > 0))
            t = int(np.count_nonzero(diff == 0))
            l = int(np.count_nonzero(diff < 0))
            out[a][b] = WtlEntry(w, t, l, *_split_ties(w, t, l))
    return out, wtl_threshold(table.M)


@dataclass(frozen=True)
class RankReport:
    model_names: list[str]
    dataset_names: list[str]
    ranks: NDArray[np.float64]
    avg_ranks: NDArray[np.float64]
    chi2_f: float
    f_f: float
    cd: float | None
    significant: NDArray[np.bool_] | None
    pairwise_wtl: list[list[WtlEntry | None]]
    win_threshold: float
    f_critical: float | None = None

    @property
    def k(self) -> int:
        return len(self.model_names)

    @property
    def M(self) -> int:
        return len(self.dataset_names)

    def verdict_lines(self) -> list[str]:
        lines = [
            f"chi2_F = {self.chi2_f:.4f} with {self.k - 1} dof",
            f"F_F = {self.f_f:.4f} with ({self.k - 1}, {(self.M - 1) * (self.k - 1)}) dof",
        ]
        if self.f_critical is not None:
            decision = "reject" if self.f_f > self.f_critical else "retain"
            lines.append(
                f"Friedman: {decision} the equal-performance null "
                f"(F_F = {self.f_f:.2f} vs critical {self.f_critical:.3f})"
            )
        if self.cd is None:
            lines.append("Nemenyi: critical difference unavailable for this k")
        else:
            lines.append(f"Nemenyi CD (alpha = 0.05) = {self.cd:.4f}")
            for a in range(self.k):
                for b in range(a + 1, self.k):
                    gap = abs(self.avg_ranks[a] - self.avg_ranks[b])
                    tag = "significant" if self.significant[a, b] else "not significant"
                    lines.append(
                        f"  {self.model_names[a]} vs {self.model_names[b]}: "
                        f"rank gap {gap:.4f} -> {tag}"
                    )
        lines.append(f"Win-tie-loss threshold = {self.win_threshold:.4f} wins")
        return lines

    def to_markdown(self) -> str:
        names = self.model_names
        out = ["# Rank report", "", f"{self.M} datasets, {self.k} models.", ""]
        out.append("| dataset | " + " | ".join(names) + " |")
        out.append("|---" * (self.k + 1) + "|")
        for d, row in zip(self.dataset_names, self.ranks):
            out.append(f"| {d} | " + " | ".join(f"{r:g}" for r in row) + " |")
        out.append("| **average rank** | " + " | ".join(f"{r:.4f}" for r in self.avg_ranks) + " |")
        out += ["", "## Tests", ""]
        out += [f"- {line.strip()}" for line in self.verdict_lines()]
        out += ["", "## Pairwise win-tie-loss (row vs column)", ""]
        out.append("| | " + " | ".join(names) + " |")
        out.append("|---" * (self.k + 1) + "|")
        for a, name in enumerate(names):
            cells = [
                "" if e is None else f"[{e.win}, {e.tie}, {e.loss}]" for e in self.pairwise_wtl[a]
            ]
            out.append(f"| {name} | " + " | ".join(cells) + " |")
        return "\n".join(out) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["section", "row", "column", "value"])
        for d, row in zip(self.dataset_names, self.ranks):
            for name, r in zip(self.model_names, row):
                w.writerow(["rank", d, name, repr(float(r))])
        for name, r in zip(self.model_names, self.avg_ranks):
            w.writerow(["avg_rank", "", name, repr(float(r))])
        w.writerow(["chi2_f", "", "", repr(self.chi2_f)])
        w.writerow(["f_f", "", "", repr(self.f_f)])
        w.writerow(["cd", "", "", "" if self.cd is None else repr(self.cd)])
        w.writerow(["win_threshold", "", "", repr(self.win_threshold)])
        for a, row in enumerate(self.pairwise_wtl):
            for b, e in enumerate(row):
                if e is None:
                    continue
                sig = "" if self.significant is None else str(bool(self.significant[a, b]))
                w.writerow(
                    ["wtl", self.model_names[a], self.model_names[b],
                     f"{e.win};{e.tie};{e.loss};{e.adjusted_win}"]
                )
                w.writerow(["nemenyi_significant", self.model_names[a], self.model_names[b], sig])
        return buf.getvalue()


def rank_report(table: ResultsTable, f_critical: float | None = None) -> RankReport:
    ranks = rank_rows(table)
    avg = ranks.mean(axis=0)
    chi2 = friedman_chi2(avg, table.M)
    try:
        f_f = friedman_f(chi2, table.M, table.k)
    except DegenerateDenominator:
        # Every dataset ranks the models identically.
        f_f = math.inf
    try:
        cd = nemenyi_cd(table.k, table.M)
        sig = nemenyi_significant(avg, cd)
    except UnsupportedK:
        cd, sig = None, None
    wtl, threshold = win_tie_loss(table)
    return RankReport(
        table.model_names, table.dataset_names, ranks, avg, chi2, f_f, cd, sig, wtl, threshold,
        f_critical,
    )
