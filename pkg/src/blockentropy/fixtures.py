"""Shipped constraint-set fixtures."""
import json
from importlib import resources

from .io import spec_from_dict

NAMES = (
    "classical_simplex2",
    "classical_segment",
    "gibbs_uniform_r2",
    "gibbs_uniform_r3",
    "mixed_hull",
    "quantum_simplex2",
)


def fixture_path(name):
    return resources.files(__package__).joinpath("fixtures", f"{name}.json")


def load_fixture(name):
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(NAMES)}")
    return spec_from_dict(json.loads(fixture_path(name).read_text(encoding="utf-8")))
