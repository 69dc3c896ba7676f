import argparse
import json

from constants import TWO_PI
from saddlecount.operations.models import SingularityRow
from saddlecount.routers.base import CommandRouter, SurfaceRequest, add_run_arguments, add_surface_argument, write_outputs


class ValidateRequest(SurfaceRequest):
    pass


def configure(parser: argparse.ArgumentParser) -> None:
    add_surface_argument(parser)
    add_run_arguments(parser)


def run(request: ValidateRequest) -> None:
    s = request.load()
    rows = [SingularityRow(id=item.id, cone_angle_multiple=item.cone_angle_multiple,
                           cone_angle=TWO_PI * item.cone_angle_multiple) for item in s.singularities]
    write_outputs(request, "validate", SingularityRow, rows)
    print(json.dumps({
        "area": s.area,
        "fingerprint": s.fingerprint,
        "genus": s.genus,
        "singularities": [row.cone_angle_multiple for row in rows],
    }, sort_keys=True))


router = CommandRouter("validate", "check a SurfaceSpec and list its cone points", ValidateRequest, configure, run)
