import argparse
from typing import List

from pydantic import Field

from constants import QUAD_MAX_NODES
from saddlecount.operations.flat_sampling import integrability_probe
from saddlecount.operations.models import IntegrabilityRow
from saddlecount.routers.base import CommandRouter, SurfaceRequest, add_run_arguments, add_surface_argument, write_outputs


class IntegrabilityRequest(SurfaceRequest):
    alpha2: float = Field(1.5, ge=1, lt=2)
    t: List[float] = Field(default_factory=lambda: [float(k) for k in range(9)], min_length=1)
    n_quad: int = Field(256, ge=16)
    max_nodes: int = Field(QUAD_MAX_NODES, ge=16)


def configure(parser: argparse.ArgumentParser) -> None:
    add_surface_argument(parser)
    parser.add_argument("--alpha2", type=float, default=argparse.SUPPRESS)
    parser.add_argument("--t", type=float, nargs="+", default=argparse.SUPPRESS)
    parser.add_argument("--n-quad", dest="n_quad", type=int, default=argparse.SUPPRESS)
    parser.add_argument("--max-nodes", dest="max_nodes", type=int, default=argparse.SUPPRESS)
    add_run_arguments(parser)


def run(request: IntegrabilityRequest) -> None:
    rows = integrability_probe(request.alpha2, request.t, request.load(), request.n_quad, request.max_nodes,
                               request.threads)
    write_outputs(request, "integrability", IntegrabilityRow, rows)
    for row in rows:
        print(f"{row.t!r} {row.value!r} {row.running_sup!r}")


router = CommandRouter("integrability", "circle averages of systole^(-alpha2) along a_t", IntegrabilityRequest,
                       configure, run)
