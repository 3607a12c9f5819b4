from __future__ import annotations

import json
from pathlib import Path
from typing import List, Optional

import yaml
from pydantic import ValidationError

from vemmhd.errors import ConfigError

from .schema import Preset


def discover_presets(packs_dir: Optional[Path] = None) -> List[dict]:
    """
    List every preset that loads and validates, as ``{"name", "kind", "description"}`` dicts.

    Broken packs are skipped so one bad file does not hide the others.
    """
    registry = PresetRegistry(packs_dir)
    out = []
    for name in registry.list():
        try:
            preset = registry.load(name)
        except ConfigError:
            continue
        out.append({"name": name, "kind": preset.kind, "description": preset.description})
    return out


class PresetRegistry:
    def __init__(self, packs_dir: Optional[Path] = None) -> None:
        self.packs_dir = packs_dir or (Path(__file__).parent / "packs")

    def list(self) -> List[str]:
        if not self.packs_dir.exists():
            return []
        names = [p.stem for p in self.packs_dir.glob("*.yaml")]
        names += [p.stem for p in self.packs_dir.glob("*.json")]
        return sorted(set(names))

    def load(self, name: str) -> Preset:
        y = self.packs_dir / f"{name}.yaml"
        j = self.packs_dir / f"{name}.json"
        try:
            if y.exists():
                return Preset.model_validate(yaml.safe_load(y.read_text("utf-8")))
            if j.exists():
                return Preset.model_validate(json.loads(j.read_text("utf-8")))
        except (ValidationError, yaml.YAMLError, json.JSONDecodeError) as e:
            raise ConfigError(f"preset {name!r} is invalid: {e}") from e
        raise ConfigError(f"preset not found: {name}", {"available": self.list()})
