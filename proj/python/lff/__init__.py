"""Finite model finding for many-sorted first-order logic problems."""

import json

from . import _lff
from ._lff import InvalidArgument, Service, default_corpus_dir

__all__ = [
    "InvalidArgument",
    "Service",
    "by_day_csv",
    "check",
    "default_corpus_dir",
    "diagnose",
    "intervals_csv",
    "puzzle",
    "puzzles",
    "solve",
    "verify_corpus",
]


def _options(options):
    return json.dumps(options) if options else ""


def check(text):
    return json.loads(_lff.check(text))


def solve(text, **options):
    """Options: maxModels, deadlineSecs, symmetryBreaking, bounds."""
    return json.loads(_lff.solve(text, _options(options)))


def diagnose(text, kind="mus", **options):
    return json.loads(_lff.diagnose(text, kind, _options(options)))


def puzzles(level=None, corpus=None):
    return json.loads(_lff.puzzles(corpus or "", level or ""))


def puzzle(puzzle_id, corpus=None):
    return json.loads(_lff.puzzle(corpus or "", puzzle_id))


def verify_corpus(corpus=None, deadline=5.0):
    return json.loads(_lff.verify_corpus(corpus or "", deadline))


def by_day_csv(log):
    return _lff.by_day_csv(str(log))


def intervals_csv(log, session):
    return _lff.intervals_csv(str(log), session)
