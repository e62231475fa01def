"""Bounded model checking with loop acceleration and trace automata."""

import json

from ._accelbmc import (
    AcceleratedCfa,
    Cfa,
    ParseError,
    RestrictedCfa,
    accelerate,
    load,
    oracle,
    parse,
    restrict,
)
from . import _accelbmc

__all__ = [
    "AcceleratedCfa",
    "Cfa",
    "ParseError",
    "RestrictedCfa",
    "accelerate",
    "check",
    "load",
    "oracle",
    "parse",
    "restrict",
    "run",
]


def check(cfa, unwind, timeout=30.0):
    """Bounded check of one CFA; returns verdict, bound and counterexample."""
    return json.loads(_accelbmc.check_json(cfa, unwind, timeout))


def run(path, mode="accel-ta", unwind=None, width=None, timeout=30.0):
    """Full pipeline on a file; returns the same record as the CLI's --json."""
    return json.loads(_accelbmc.run_json(path, mode, unwind, width, timeout))
