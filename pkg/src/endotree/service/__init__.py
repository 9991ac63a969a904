"""JSON service wrapping the core pipelines.

:mod:`endotree.service.models` defines the request/response schema,
:mod:`endotree.service.handlers` implements one function per endpoint,
and :mod:`endotree.service.app` exposes them over HTTP.  The command-line
client dispatches to the same handlers in process.
"""

from .app import app, create_app

__all__ = ["app", "create_app"]
