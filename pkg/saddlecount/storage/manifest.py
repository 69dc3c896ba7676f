import json
from pathlib import Path
from typing import Any, Dict

import constants


def build_manifest(command: str, params: Dict[str, Any], seed: int | None) -> Dict[str, Any]:
    return {
        "command": command,
        "params": params,
        "seed": seed,
        "version": constants.APP_VERSION,
    }


def write_manifest(path: Path | str, command: str, params: Dict[str, Any], seed: int | None = None) -> Path:
    """Sorted-keys JSON with every parameter, the seed and the code version; no timestamps."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    blob = json.dumps(build_manifest(command, params, seed), sort_keys=True, indent=2, default=str)
    path.write_text(blob + "\n", encoding="utf-8")
    return path
