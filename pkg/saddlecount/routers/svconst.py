import argparse
import json
from typing import Literal

from pydantic import Field

import constants
from saddlecount.operations.flat_sampling import mc_siegel_veech, sample_rows, sample_torus
from saddlecount.operations.models import MonteCarloRow, SampleRow
from saddlecount.operations.planar_functions import BallIndicator, PlanarFunction, RadialBump, SectorIndicator
from saddlecount.routers.base import CommandRouter, RunConfig, add_run_arguments, write_outputs


class SvconstRequest(RunConfig):
    n: int = Field(10_000, ge=1)
    seed: int = Field(default_factory=lambda: constants.DEFAULT_SEED)
    psi: Literal["ball", "sector", "bump"] = "ball"
    radius: float = Field(1.0, gt=0)
    dump_samples: bool = False

    def function(self) -> PlanarFunction:
        if self.psi == "ball":
            return BallIndicator(self.radius)
        if self.psi == "sector":
            return SectorIndicator(self.radius, 0.5)
        return RadialBump(self.radius)


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, default=argparse.SUPPRESS, help="number of torus samples")
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    parser.add_argument("--psi", choices=["ball", "sector", "bump"], default=argparse.SUPPRESS)
    parser.add_argument("--radius", type=float, default=argparse.SUPPRESS)
    parser.add_argument("--dump-samples", dest="dump_samples", action="store_true", default=argparse.SUPPRESS)
    add_run_arguments(parser)


def run(request: SvconstRequest) -> None:
    report = mc_siegel_veech(request.function(), request.n, request.seed, request.threads)
    write_outputs(request, "svconst", MonteCarloRow, [MonteCarloRow(**report.model_dump())], seed=request.seed)
    if request.dump_samples:
        samples = sample_torus(request.seed, request.n)
        write_outputs(request, "svconst", SampleRow, sample_rows(samples), seed=request.seed, stem="svconst_samples")
    print(json.dumps({**report.model_dump(), "expected": constants.TORUS_SV_CONSTANT}, sort_keys=True))


router = CommandRouter("svconst", "Monte Carlo Siegel-Veech constant on the torus locus", SvconstRequest,
                       configure, run)
