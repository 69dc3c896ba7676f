import argparse
import json
import math
from typing import Optional

from pydantic import Field, model_validator

from saddlecount.operations.counting import fit_growth, scan_counts, scan_rows
from saddlecount.operations.models import ScanRow
from saddlecount.routers.base import (
    CommandRouter,
    GridFields,
    RunConfig,
    SectorFields,
    add_grid_arguments,
    add_run_arguments,
    add_sector_arguments,
    write_outputs,
)
from saddlecount.routers.enumeration import ConfigurationFields, add_configuration_arguments
from saddlecount.storage.csv_interface import CsvInterface
from saddlecount.storage.surfaces import load_surface


class FitRequest(RunConfig, ConfigurationFields, SectorFields, GridFields):
    surface: Optional[str] = None
    input: Optional[str] = None
    tail_fraction: float = Field(0.5, gt=0, le=1)
    refine: bool = False

    @model_validator(mode="after")
    def _one_source(self) -> "FitRequest":
        if (self.surface is None) == (self.input is None):
            raise ValueError("give exactly one of a surface or --input scan CSV")
        return self


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("surface", nargs="?", default=argparse.SUPPRESS, help="SurfaceSpec JSON to scan")
    parser.add_argument("--input", default=argparse.SUPPRESS, help="existing scan CSV to fit instead")
    parser.add_argument("--tail-fraction", dest="tail_fraction", type=float, default=argparse.SUPPRESS)
    parser.add_argument("--refine", action="store_true", default=argparse.SUPPRESS,
                        help="also fit N = cX + bT^e with curve_fit")
    add_grid_arguments(parser)
    add_sector_arguments(parser)
    add_configuration_arguments(parser)
    add_run_arguments(parser)


def run(request: FitRequest) -> None:
    sector = request.sector()
    if request.input is not None:
        series = [(row.T, row.N) for row in CsvInterface(ScanRow).read(request.input)]
    else:
        s = load_surface(request.surface)
        series = scan_counts(s, request.radii(), sector, request.configuration(), request.threads)
    fit = fit_growth(series, sector, request.tail_fraction, request.refine)
    write_outputs(request, "fit", ScanRow, scan_rows(series, fit, sector))
    print(json.dumps({
        "c_hat": fit.c_hat,
        "c_hat_pi": fit.c_hat * math.pi,
        "error_exponent": fit.error_exponent,
        "envelope_exponent": fit.envelope_exponent,
        "refined_c": fit.refined_c,
        "refined_exponent": fit.refined_exponent,
        "tail_start": fit.tail_start,
    }, sort_keys=True))


router = CommandRouter("fit", "least-squares quadratic growth fit and error exponent", FitRequest, configure, run)
