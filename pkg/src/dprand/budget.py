"""Randomness-budget arithmetic for hierarchical-histogram workloads.

Every protected histogram cell at every geographic unit consumes a fixed
number of random bits, so the total is a product of exact integers. All
arithmetic here is unbounded-precision: the answers span fifteen orders of
magnitude and a float intermediate would quietly lose the low digits.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import prod
from pathlib import Path

from .errors import InvalidSpec

TB = 10 ** 12  # decimal terabyte


@dataclass(frozen=True)
class Geolevel:
    name: str
    count: int


@dataclass(frozen=True)
class BudgetSpec:
    """Histogram dimension factors, the geographic spine, and bits per cell."""

    person_hist_dims: list[int]
    unit_hist_dims: list[int]
    geolevels: list[Geolevel]
    bits_per_cell: int = 64
    extra_cells_per_geolevel: int = 0

    def __post_init__(self):
        for label, dims in (("person", self.person_hist_dims), ("unit", self.unit_hist_dims)):
            if not dims:
                raise InvalidSpec(f"{label} histogram needs at least one dimension factor")
            if any(int(d) != d or d < 1 for d in dims):
                raise InvalidSpec(f"{label} histogram dimensions must be integers >= 1")
        if not self.geolevels:
            raise InvalidSpec("at least one geolevel is required")
        if any(g.count < 1 for g in self.geolevels):
            raise InvalidSpec("every geolevel needs >= 1 geounits")
        if self.bits_per_cell < 1:
            raise InvalidSpec("bits_per_cell must be >= 1")
        if self.extra_cells_per_geolevel < 0:
            raise InvalidSpec("extra_cells_per_geolevel must be >= 0")

    @property
    def person_hist_cells(self) -> int:
        return prod(self.person_hist_dims)

    @property
    def unit_hist_cells(self) -> int:
        return prod(self.unit_hist_dims)

    @classmethod
    def from_json(cls, text: str) -> "BudgetSpec":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"not valid JSON: {exc}") from None
        try:
            return cls(
                person_hist_dims=[int(d) for d in raw["person_hist_dims"]],
                unit_hist_dims=[int(d) for d in raw["unit_hist_dims"]],
                geolevels=[Geolevel(str(g["name"]), int(g["count"])) for g in raw["geolevels"]],
                bits_per_cell=int(raw.get("bits_per_cell", 64)),
                extra_cells_per_geolevel=int(raw.get("extra_cells_per_geolevel", 0)),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidSpec(f"missing or malformed field: {exc}") from None

    @classmethod
    def from_file(cls, path: str | Path) -> "BudgetSpec":
        return cls.from_json(Path(path).read_text())


@dataclass(frozen=True)
class BudgetReport:
    total_cells: int
    total_bits: int
    total_bytes: int
    per_geolevel_bits: list[dict] = field(default_factory=list)

    @property
    def terabytes(self) -> float:
        return self.total_bytes / TB

    def human_readable(self) -> str:
        return f"{self.terabytes:,.1f} TB ({self.total_bytes:,} bytes)"

    def to_dict(self) -> dict:
        return {
            "schema": "dprand.budget/1",
            "total_cells": self.total_cells,
            "total_bits": self.total_bits,
            "total_bytes": self.total_bytes,
            "terabytes": self.terabytes,
            "per_geolevel_bits": self.per_geolevel_bits,
        }

    def to_text(self) -> str:
        rows = [(g["name"], f'{g["cells"]:,}', f'{g["bits"]:,}') for g in self.per_geolevel_bits]
        widths = [max(len(r[i]) for r in rows + [("geolevel", "cells", "bits")]) for i in range(3)]
        lines = [
            f'{"geolevel":<{widths[0]}}  {"cells":>{widths[1]}}  {"bits":>{widths[2]}}',
        ]
        lines += [f"{name:<{widths[0]}}  {cells:>{widths[1]}}  {bits:>{widths[2]}}"
                  for name, cells, bits in rows]
        lines.append("")
        lines.append(f"total cells: {self.total_cells:,}")
        lines.append(f"total bits:  {self.total_bits:,}")
        lines.append(f"total:       {self.human_readable()}")
        return "\n".join(lines)


def compute_budget(spec: BudgetSpec) -> BudgetReport:
    """Total bits = bits_per_cell x (person cells + unit cells + extras) over every geounit."""
    cells_per_geounit = spec.person_hist_cells + spec.unit_hist_cells
    per_level = []
    total_cells = 0
    for level in spec.geolevels:
        level_cells = cells_per_geounit * level.count + spec.extra_cells_per_geolevel
        total_cells += level_cells
        per_level.append({
            "name": level.name,
            "geounits": level.count,
            "cells": level_cells,
            "bits": level_cells * spec.bits_per_cell,
        })
    total_bits = total_cells * spec.bits_per_cell
    return BudgetReport(
        total_cells=total_cells,
        total_bits=total_bits,
        total_bytes=total_bits // 8 + (1 if total_bits % 8 else 0),
        per_geolevel_bits=per_level,
    )


def us_2020_spec() -> BudgetSpec:
    """The documented US-run example: both histograms over the six-level spine."""
    return BudgetSpec(
        person_hist_dims=[42, 2, 116, 2, 63],
        unit_hist_dims=[2, 9, 2, 7, 4, 2, 522],
        geolevels=[
            Geolevel("nation", 1),
            Geolevel("state-equivalents", 51),
            Geolevel("county-equivalents", 3143),
            Geolevel("tracts", 73782),
            Geolevel("block-groups", 217550),
            Geolevel("blocks", 8000000),
        ],
        bits_per_cell=64,
    )
