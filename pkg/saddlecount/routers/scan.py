import argparse

from saddlecount.errors import InsufficientData
from saddlecount.operations.counting import fit_growth, scan_counts, scan_rows
from saddlecount.operations.models import ScanRow
from saddlecount.routers.base import (
    CommandRouter,
    GridFields,
    SectorFields,
    SurfaceRequest,
    add_grid_arguments,
    add_run_arguments,
    add_sector_arguments,
    add_surface_argument,
    write_outputs,
)
from saddlecount.routers.enumeration import ConfigurationFields, add_configuration_arguments


class ScanRequest(SurfaceRequest, ConfigurationFields, SectorFields, GridFields):
    pass


def configure(parser: argparse.ArgumentParser) -> None:
    add_surface_argument(parser)
    add_grid_arguments(parser)
    add_sector_arguments(parser)
    add_configuration_arguments(parser)
    add_run_arguments(parser)


def run(request: ScanRequest) -> None:
    s = request.load()
    sector = request.sector()
    series = scan_counts(s, request.radii(), sector, request.configuration(), request.threads)
    try:
        fit = fit_growth(series, sector)
    except InsufficientData:
        fit = None
    write_outputs(request, "scan", ScanRow, scan_rows(series, fit, sector))
    for T, N in series:
        print(f"{T!r} {N}")


router = CommandRouter("scan", "counts N(T) over a grid of radii from one enumeration", ScanRequest, configure, run)
