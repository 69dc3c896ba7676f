#main.py
import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

import constants
from saddlecount import __version__
from saddlecount.errors import SaddleCountError
from saddlecount.logs import configure_logging
from saddlecount.routers import ROUTERS

logger = logging.getLogger("saddlecount")

CONFIG_EXIT = 2
COMPUTATION_EXIT = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="saddlecount", description="Saddle connection counting on translation surfaces.")
    parser.add_argument("--version", action="version", version=f"saddlecount {__version__}")
    parser.add_argument("--log-level", dest="log_level", default=constants.LOG_LEVEL)
    commands = parser.add_subparsers(dest="command", required=True)
    for router in ROUTERS:
        sub = commands.add_parser(router.name, help=router.help)
        router.configure(sub)
        sub.set_defaults(router=router)
    return parser


def _emit_error(record: dict) -> None:
    print(json.dumps(record, sort_keys=True), file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = vars(build_parser().parse_args(argv))
    configure_logging(args.pop("log_level").upper())
    router = args.pop("router")
    args.pop("command")
    try:
        request = router.request.model_validate(args)
        router.handler(request)
    except SaddleCountError as exc:
        _emit_error(exc.to_record())
        return exc.exit_code
    except ValidationError as exc:
        _emit_error({"error": "InvalidParameter", "detail": str(exc.errors(include_url=False)), "exit_code": CONFIG_EXIT})
        return CONFIG_EXIT
    except Exception as exc:
        logger.exception("[%s] unexpected failure", router.name.upper())
        _emit_error({"error": "UnexpectedError", "detail": repr(exc), "exit_code": COMPUTATION_EXIT})
        return COMPUTATION_EXIT
    return 0


if __name__ == "__main__":
    sys.exit(main())
