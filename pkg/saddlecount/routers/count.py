import argparse
from typing import List, Optional

from pydantic import Field

from saddlecount.operations.counting import count_ellipse, count_sector
from saddlecount.operations.models import CountRow
from saddlecount.operations.saddle_enum import enumerate_holonomies
from saddlecount.routers.base import (
    CommandRouter,
    SectorFields,
    SurfaceRequest,
    add_g_argument,
    add_run_arguments,
    add_sector_arguments,
    add_surface_argument,
    group_element,
    write_outputs,
)


class CountRequest(SurfaceRequest, SectorFields):
    T: float = Field(..., ge=0)
    g: Optional[List[float]] = Field(None, min_length=4, max_length=4)


def configure(parser: argparse.ArgumentParser) -> None:
    add_surface_argument(parser)
    parser.add_argument("-T", "--radius", dest="T", type=float, required=True)
    add_sector_arguments(parser)
    add_g_argument(parser)
    add_run_arguments(parser)


def run(request: CountRequest) -> None:
    s = request.load()
    sector = request.sector()
    if request.g is None:
        holonomies = enumerate_holonomies(s, request.T, request.threads)
        value = count_sector(holonomies, request.T, sector)
    else:
        g = group_element(request.g)
        holonomies = enumerate_holonomies(s, request.T * g.operator_norm(), request.threads)
        value = count_ellipse(holonomies, request.T, g, sector)
    write_outputs(request, "count", CountRow, [CountRow(T=request.T, phi1=request.phi1, phi2=request.phi2, N=value)])
    print(value)


router = CommandRouter("count", "count saddle connections in a sector (or ellipse) of radius T", CountRequest,
                       configure, run)
