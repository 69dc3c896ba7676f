import argparse
import math
from typing import List, Literal

from pydantic import Field, field_validator

from saddlecount.operations.averaging import sandwich_check, theta_t
from saddlecount.operations.models import SandwichRow
from saddlecount.operations.saddle_enum import enumerate_holonomies
from saddlecount.routers.base import (
    CommandRouter,
    SectorFields,
    SurfaceRequest,
    add_run_arguments,
    add_sector_arguments,
    add_surface_argument,
    write_outputs,
)


class SandwichRequest(SurfaceRequest, SectorFields):
    t: List[float] = Field(..., min_length=1)
    theta: List[float] = Field(..., min_length=1)
    method: Literal["exact", "quadrature"] = "exact"
    n_quad: int = Field(256, ge=16)

    @field_validator("theta")
    @classmethod
    def _angles(cls, values: List[float]) -> List[float]:
        if any(not 0 < value < 1 for value in values):
            raise ValueError("every theta must lie in (0, 1)")
        return values


def configure(parser: argparse.ArgumentParser) -> None:
    add_surface_argument(parser)
    parser.add_argument("--t", type=float, nargs="+", required=True)
    parser.add_argument("--theta", type=float, nargs="+", required=True)
    parser.add_argument("--method", choices=["exact", "quadrature"], default=argparse.SUPPRESS)
    parser.add_argument("--n-quad", dest="n_quad", type=int, default=argparse.SUPPRESS)
    add_sector_arguments(parser)
    add_run_arguments(parser)


def run(request: SandwichRequest) -> None:
    s = request.load()
    sector = request.sector()
    radius = max(math.exp(t) / math.cos(theta_t(theta, t)) for t in request.t for theta in request.theta)
    holonomies = enumerate_holonomies(s, radius, request.threads)
    rows = []
    for t in request.t:
        for theta in request.theta:
            report = sandwich_check(s, t, theta, sector, request.n_quad, request.method, holonomies)
            rows.append(SandwichRow(**report.model_dump()))
    write_outputs(request, "sandwich", SandwichRow, rows)
    violations = sum(not (row.lower <= row.middle + row.slack and row.middle <= row.upper + row.slack) for row in rows)
    print(f"{len(rows)} checks, {violations} violations")


router = CommandRouter("sandwich", "check lower <= N(e^t) <= upper for the triangle averages", SandwichRequest,
                       configure, run)
