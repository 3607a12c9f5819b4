from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from vemmhd.errors import MeshFormatError
from vemmhd.mesh.polymesh import PolyMesh, build_mesh


def write_mesh(mesh: PolyMesh, path: Union[str, Path]) -> Path:
    """Write ``{"vertices": [[x, y], ...], "cells": [[i0, i1, ...], ...]}`` as UTF-8 JSON."""
    path = Path(path)
    payload = {
        "vertices": [[float(x), float(y)] for x, y in mesh.vertices],
        "cells": [[int(i) for i in loop] for loop in mesh.cells],
    }
    path.write_text(json.dumps(payload, indent=1), encoding="utf-8")
    return path


def read_mesh(path: Union[str, Path]) -> PolyMesh:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise MeshFormatError(f"mesh file not found: {path}") from e
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise MeshFormatError(f"mesh file {path} is not valid JSON: {e}") from e

    if not isinstance(data, dict) or "vertices" not in data or "cells" not in data:
        raise MeshFormatError(f"mesh file {path} needs 'vertices' and 'cells'")
    try:
        return build_mesh(data["vertices"], data["cells"])
    except (TypeError, ValueError) as e:
        raise MeshFormatError(f"mesh file {path} has malformed entries: {e}") from e
