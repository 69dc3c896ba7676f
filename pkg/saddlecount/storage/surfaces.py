import json
from pathlib import Path

from saddlecount.errors import MalformedSpec
from saddlecount.operations.models import PolygonSpec, SquareTiledSpec, parse_surface_spec
from saddlecount.operations.surface_core import TranslationSurface, build_surface


def load_surface_spec(path: Path | str) -> SquareTiledSpec | PolygonSpec:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise MalformedSpec(f"surface spec {path} does not exist") from exc
    except json.JSONDecodeError as exc:
        raise MalformedSpec(f"surface spec {path} is not valid JSON: {exc.msg}") from exc
    return parse_surface_spec(data)


def load_surface(path: Path | str) -> TranslationSurface:
    return build_surface(load_surface_spec(path))
