import argparse
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, List, Optional, Type

from pydantic import BaseModel, ConfigDict, Field, model_validator

import constants
from saddlecount.operations.models import SectorSpec
from saddlecount.operations.surface_core import GroupElement, TranslationSurface
from saddlecount.storage.csv_interface import CsvInterface
from saddlecount.storage.manifest import write_manifest
from saddlecount.storage.surfaces import load_surface


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    out: str = Field(default_factory=lambda: constants.OUTPUT_DIR)
    threads: int = Field(default_factory=lambda: constants.DEFAULT_THREADS, ge=1)


class SurfaceRequest(RunConfig):
    surface: str = Field(..., min_length=1)

    def load(self) -> TranslationSurface:
        return load_surface(self.surface)


class SectorFields(BaseModel):
    phi1: float = 0.0
    phi2: float = constants.TWO_PI

    @model_validator(mode="after")
    def _check_sector(self):
        width = self.phi2 - self.phi1
        if not (math.isfinite(width) and 0 <= width <= constants.TWO_PI + 1e-12):
            raise ValueError("sector width must lie in [0, 2*pi]")
        return self

    def sector(self) -> SectorSpec:
        return SectorSpec(phi1=self.phi1, phi2=self.phi2)


class GridFields(BaseModel):
    grid: Optional[List[float]] = None
    t_min: float = Field(20.0, gt=0)
    t_max: float = Field(200.0, gt=0)
    points: int = Field(40, ge=2)

    @model_validator(mode="after")
    def _check_grid(self):
        if self.grid is not None:
            if not self.grid:
                raise ValueError("grid must not be empty")
            if any(later < earlier for earlier, later in zip(self.grid, self.grid[1:])):
                raise ValueError("grid must be sorted ascending")
        elif self.t_max < self.t_min:
            raise ValueError("t_max must not be below t_min")
        return self

    def radii(self) -> List[float]:
        if self.grid is not None:
            return list(self.grid)
        ratio = (self.t_max / self.t_min) ** (1.0 / (self.points - 1))
        return [self.t_min * ratio ** k for k in range(self.points - 1)] + [self.t_max]


def group_element(entries: Optional[List[float]]) -> GroupElement:
    if entries is None:
        return GroupElement.identity()
    a, b, c, d = entries
    return GroupElement(a, b, c, d)


@dataclass(frozen=True)
class CommandRouter:
    """One CLI subcommand: its arguments, request model and handler."""
    name: str
    help: str
    request: Type[RunConfig]
    configure: Callable[[argparse.ArgumentParser], None]
    handler: Callable[[Any], None]


def add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    parser.add_argument("--threads", type=int, default=argparse.SUPPRESS)


def add_surface_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("surface", help="path to a SurfaceSpec JSON document")


def add_sector_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--phi1", type=float, default=argparse.SUPPRESS)
    parser.add_argument("--phi2", type=float, default=argparse.SUPPRESS)


def add_grid_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--grid", type=float, nargs="+", default=argparse.SUPPRESS, help="explicit sorted radii")
    parser.add_argument("--t-min", dest="t_min", type=float, default=argparse.SUPPRESS)
    parser.add_argument("--t-max", dest="t_max", type=float, default=argparse.SUPPRESS)
    parser.add_argument("--points", type=int, default=argparse.SUPPRESS, help="geometric grid size")


def add_g_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--g", type=float, nargs=4, metavar=("A", "B", "C", "D"), default=argparse.SUPPRESS,
                        help="group element [[A, B], [C, D]] of determinant one")


def write_outputs(request: RunConfig, command: str, row_class: Type[BaseModel], rows: Iterable[BaseModel],
                  seed: Optional[int] = None, stem: Optional[str] = None) -> Path:
    """<out>/<stem>.csv plus <out>/<stem>.manifest.json."""
    out = Path(request.out)
    stem = stem or command
    csv_path = out / f"{stem}.csv"
    CsvInterface(row_class).write(csv_path, rows)
    write_manifest(out / f"{stem}.manifest.json", command, request.model_dump(mode="json"), seed)
    return csv_path


def fmt(value: float) -> str:
    if isinstance(value, float) and math.isfinite(value):
        return repr(value)
    return str(value)
