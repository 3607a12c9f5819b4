from vemmhd.presets.registry import PresetRegistry, discover_presets
from vemmhd.presets.schema import ExpectedRates, Preset

__all__ = ["ExpectedRates", "Preset", "PresetRegistry", "discover_presets"]
