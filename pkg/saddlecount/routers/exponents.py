import argparse

from pydantic import Field, model_validator

import constants
from saddlecount.operations.exponents import build_ledger, ledger_rows
from saddlecount.operations.models import LedgerRow
from saddlecount.routers.base import CommandRouter, RunConfig, add_run_arguments, write_outputs


class ExponentsRequest(RunConfig):
    lam: float = Field(default_factory=lambda: constants.DEFAULT_LAMBDA, gt=0, le=1)
    alpha1: float = Field(1.001, gt=1, lt=2)
    alpha2: float = Field(1.999, gt=1, lt=2)
    uniform: bool = False

    @model_validator(mode="after")
    def _ordered(self) -> "ExponentsRequest":
        if not self.alpha1 < self.alpha2:
            raise ValueError("alpha1 must be below alpha2")
        return self


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lambda", dest="lam", type=float, default=argparse.SUPPRESS, help="spectral gap size")
    parser.add_argument("--alpha1", type=float, default=argparse.SUPPRESS)
    parser.add_argument("--alpha2", type=float, default=argparse.SUPPRESS)
    parser.add_argument("--uniform", action="store_true", default=argparse.SUPPRESS,
                        help="only the uniform (moving sector) variant")
    add_run_arguments(parser)


def run(request: ExponentsRequest) -> None:
    variants = (True,) if request.uniform else (False, True)
    rows = []
    for uniform in variants:
        rows.extend(ledger_rows(build_ledger(request.lam, request.alpha1, request.alpha2, uniform)))
    write_outputs(request, "exponents", LedgerRow, rows)
    for row in rows:
        print(f"{row.variant} {row.name} {row.value!r}")


router = CommandRouter("exponents", "closed-form exponent ledger for a spectral gap lambda", ExponentsRequest,
                       configure, run)
