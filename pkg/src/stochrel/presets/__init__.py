"""Bundled experiment presets, one config file per reproduced figure set."""

from importlib import resources

__all__ = ["list_presets", "preset_text", "preset_description"]


def _files():
    return resources.files(__name__)


def list_presets() -> list[str]:
    names = [
        p.name[: -len(".cfg")] for p in _files().iterdir() if p.name.endswith(".cfg")
    ]
    return sorted(names)


def preset_text(name: str) -> str:
    path = _files() / f"{name}.cfg"
    if not path.is_file():
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    return path.read_text(encoding="utf-8")


def preset_description(name: str) -> str:
    """First comment line of the preset file."""
    for line in preset_text(name).splitlines():
        line = line.strip()
        if line.startswith("#"):
            return line.lstrip("# ").strip()
        if line:
            break
    return ""
