"""Worker populations: CSV interchange and synthetic generation.

The canonical interchange format is a UTF-8 CSV with the exact header
``worker_id,reputation,mu_max``. Synthetic populations are deterministic
functions of a seed, drawn from the same counter-based generator family
as per-slot moods but on dedicated streams.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

from .rng import MU_MAX_STREAM, REPUTATION_STREAM, uniform01
from .workers import WorkerProfile

CSV_HEADER = ["worker_id", "reputation", "mu_max"]


@dataclass(frozen=True)
class Distribution:
    """Either ``constant(value)`` or ``uniform(lo, hi)``."""

    kind: str  # "constant" | "uniform"
    lo: float
    hi: float = 0.0

    @classmethod
    def constant(cls, value: float) -> "Distribution":
        return cls("constant", value, value)

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "Distribution":
        if hi < lo:
            raise ValueError(f"uniform bounds out of order: [{lo}, {hi}]")
        return cls("uniform", lo, hi)

    def sample(self, u: float) -> float:
        if self.kind == "constant":
            return self.lo
        return self.lo + (self.hi - self.lo) * u

    def sample_int(self, u: float) -> int:
        """Uniform integer on [lo, hi] inclusive (constant returns lo)."""
        if self.kind == "constant":
            return int(self.lo)
        lo, hi = int(self.lo), int(self.hi)
        return min(hi, lo + int(u * (hi - lo + 1)))


@dataclass(frozen=True)
class PopulationSpec:
    """Synthetic-population recipe: size, distributions and a seed."""

    count: int
    reputation_dist: Distribution = Distribution.uniform(0.5, 1.0)
    mu_max_dist: Distribution = Distribution.uniform(1, 10)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")
        if not (0.0 <= self.reputation_dist.lo and self.reputation_dist.hi <= 1.0):
            raise ValueError("reputation distribution support must be within [0, 1]")
        if self.mu_max_dist.lo < 1:
            raise ValueError("mu_max distribution support must be >= 1")


def generate(spec: PopulationSpec) -> list[WorkerProfile]:
    """Deterministically generate profiles with ids 0..count-1."""
    profiles = []
    for i in range(spec.count):
        rep = spec.reputation_dist.sample(uniform01(spec.seed, i, REPUTATION_STREAM))
        cap = spec.mu_max_dist.sample_int(uniform01(spec.seed, i, MU_MAX_STREAM))
        profiles.append(WorkerProfile(id=i, reputation=rep, mu_max=cap))
    return profiles


def load_csv(path: str) -> list[WorkerProfile]:
    """Parse and validate a worker CSV, preserving file order."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, expected header {CSV_HEADER}")
        if header != CSV_HEADER:
            raise ValueError(
                f"{path}: bad header {header!r}, expected {CSV_HEADER}"
            )
        profiles: list[WorkerProfile] = []
        seen: set[int] = set()
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 fields, got {len(row)}")
            try:
                worker_id = int(row[0])
                reputation = float(row[1])
                mu_max = int(row[2])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed row {row!r}: {exc}") from None
            if worker_id in seen:
                raise ValueError(f"{path}:{lineno}: duplicate worker id {worker_id}")
            try:
                profile = WorkerProfile(id=worker_id, reputation=reputation, mu_max=mu_max)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            seen.add(worker_id)
            profiles.append(profile)
    if not profiles:
        raise ValueError(f"{path}: no worker rows")
    return profiles


def write_csv(path: str, population: Sequence[WorkerProfile]) -> None:
    """Write the canonical worker CSV (round-trips exactly via repr floats)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for p in population:
            writer.writerow([p.id, repr(p.reputation), p.mu_max])
