"""Python access to the misanthrope simulation and verification core."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import __version__, compare as _compare


def compare(config):
    """Run the corollary experiment from a config dict; returns the summary as a dict."""
    return _json.loads(_compare(_json.dumps(config)))
