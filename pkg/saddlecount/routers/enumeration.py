import argparse
from typing import List, Literal

from pydantic import BaseModel, Field

from saddlecount.operations.models import ConfigurationFilter, HolonomyRow
from saddlecount.operations.saddle_enum import enumerate_holonomies, filter_configuration
from saddlecount.routers.base import CommandRouter, SurfaceRequest, add_run_arguments, add_surface_argument, write_outputs


class ConfigurationFields(BaseModel):
    kind: Literal["all", "loop", "pair", "cylinders"] = "all"
    singularities: List[int] = Field(default_factory=list)
    collapse: bool = False

    def configuration(self) -> ConfigurationFilter:
        return ConfigurationFilter(kind=self.kind, singularities=tuple(self.singularities),
                                   with_multiplicity=not self.collapse)


class EnumerateRequest(SurfaceRequest, ConfigurationFields):
    T: float = Field(..., ge=0)


def add_configuration_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--kind", choices=["all", "loop", "pair", "cylinders"], default=argparse.SUPPRESS)
    parser.add_argument("--singularities", type=int, nargs="+", default=argparse.SUPPRESS,
                        help="0-indexed singularity ids for loop/pair configurations")
    parser.add_argument("--collapse", action="store_true", default=argparse.SUPPRESS,
                        help="count each holonomy vector once")


def configure(parser: argparse.ArgumentParser) -> None:
    add_surface_argument(parser)
    parser.add_argument("-T", "--radius", dest="T", type=float, required=True)
    add_configuration_arguments(parser)
    add_run_arguments(parser)


def run(request: EnumerateRequest) -> None:
    s = request.load()
    config = request.configuration()
    holonomies = enumerate_holonomies(s, request.T, request.threads)
    if config.kind != "all" or not config.with_multiplicity:
        holonomies = filter_configuration(holonomies, config, request.threads)
    write_outputs(request, "enumerate", HolonomyRow, holonomies.rows())
    print(holonomies.total)


router = CommandRouter("enumerate", "list saddle connection holonomies up to length T", EnumerateRequest,
                       configure, run)
