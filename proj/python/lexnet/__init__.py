"""Word co-occurrence and word similarity networks over tokenized corpora."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import structure_report_json as _structure_report_json

__version__ = "0.1.0"


def structure_report(graph, name="", **options):
    """All structural diagnostics for ``graph`` as a dict.

    Fields that cannot be computed hold the string ``"undefined"``; the reason
    is under ``undefined_reasons``.
    """
    return _json.loads(_structure_report_json(graph, name, **options))
