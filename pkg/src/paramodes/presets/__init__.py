"""Bundled run configurations (JSON data files)."""

import json
from importlib import resources


def preset_names():
    root = resources.files(__package__)
    names = [p.name[:-5] for p in root.iterdir() if p.name.endswith(".json")]
    return sorted(names)


def load_preset(name):
    root = resources.files(__package__)
    path = root / f"{name}.json"
    try:
        text = path.read_text()
    except (FileNotFoundError, OSError):
        raise KeyError(f"unknown preset {name!r}; available: {preset_names()}")
    return json.loads(text)
